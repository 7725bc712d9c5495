import math

import numpy as np
import pytest

import weightdyn as wd


def test_activation_triples():
    a = wd.activation_eval(wd.Activation.tanh, 0.0)
    assert (a.value, a.d1, a.d2) == (0.0, 1.0, 0.0)
    g = wd.activation_eval(wd.Activation.gelu, 0.0)
    assert g.d1 == 0.5
    assert abs(g.d2 - math.sqrt(2.0 / math.pi)) < 1e-12
    r = wd.activation_eval(wd.Activation.relu, -1.0)
    assert (r.value, r.d1, r.d2) == (0.0, 0.0, 0.0)


def test_forward_and_cost():
    p = wd.Params.zeros(2, 2, 1)
    trace = wd.forward(p, np.array([0.3, -0.4]))
    assert trace.a2[0] == 0.0
    batch = wd.Batch(np.zeros((2, 1)), np.array([[3.0]]))
    assert wd.cost(p, batch) == 9.0


def test_flatten_layout():
    m = wd.StateIndexMap(2, 2, 1)
    assert m.dim == 9
    assert m.w21(0, 0) == 0 and m.w32(0, 0) == 4 and m.b1(0) == 6 and m.b2(0) == 8
    p = wd.init_he(2, 2, 1, seed=5)
    v = wd.flatten(p)
    q = wd.unflatten(v, m, wd.Activation.tanh)
    assert np.array_equal(wd.flatten(q), v)


def test_jacobian_against_fd():
    p = wd.init_he(2, 2, 1, seed=3)
    rng = np.random.default_rng(0)
    batch = wd.Batch(rng.normal(size=(2, 8)), rng.normal(size=(1, 8)))
    rep = wd.check_jacobian(p, batch, 1e-6)
    assert rep.max_abs_error < 1e-5
    assert rep.max_symmetry_defect < 1e-12
    jac = wd.jacobian_analytic(p, batch)
    assert jac.shape == (9, 9)
    assert jac[8, 8] == -2.0


def test_train_run_and_record():
    cfg = wd.TrainConfig()
    cfg.total_steps = 1000
    cfg.checkpoints = [20, 50]
    data = wd.generate_dataset(1000, cfg.seeds.data)
    rec = wd.train_run(cfg, data)
    assert not rec.diverged
    assert len(rec.checkpoints) == 2
    assert rec.checkpoints[0].interval == 20
    assert rec.checkpoints[0].ftle.shape == (9,)
    assert rec.checkpoints[0].cos_abs.shape == (9, 9)
    assert rec.spectrum.shape == (9,)
    assert rec.c_f >= 0.0
    # spectrum recomputes from the stored log diagonals
    logs = np.array(rec.log_r_diag)
    dtau = cfg.dt * cfg.steps_per_interval
    np.testing.assert_array_equal(logs.sum(axis=0) / (logs.shape[0] * dtau), rec.spectrum)


def test_ensemble_and_prediction_pipeline(tmp_path):
    cfg = wd.EnsembleConfig()
    cfg.base.total_steps = 600
    cfg.base.checkpoints = [10, 20]
    cfg.n_runs = 12
    cfg.dataset_n = 200
    data = wd.generate_dataset(cfg.dataset_n, cfg.base.seeds.data)
    result = wd.run_ensemble(cfg, data)
    assert len(result.table.rows) == 12
    assert result.spectra.shape == (12, 9)

    path = tmp_path / "outcome.csv"
    wd.write_outcome_csv(result.table, path)
    back = wd.read_outcome_csv(path)
    assert back.columns == result.table.columns
    assert back.rows[3].c_f == result.table.rows[3].c_f

    # Threshold strictly inside the train split's c_f range, so both label
    # classes are guaranteed to exist there.
    train_cf = [r.c_f for r in result.table.rows if r.run_id % 2 == 0]
    thr = 0.5 * (min(train_cf) + max(train_cf))
    lf = wd.label_outcomes(back, thr, wd.LabelDirection.below,
                           [f"ftle{q}_ck20" for q in range(1, 10)])
    model = wd.fit_naive_bayes(lf, bins=5)
    scores = wd.predict_posterior_rows(model, lf.test_features)
    assert all(0.0 <= s <= 1.0 for s in scores)
    curve = wd.roc_curve(scores, lf.test_labels)
    assert 0.0 <= curve.auc <= 1.0
    assert curve.fpr[0] == 0.0 and curve.fpr[-1] == 1.0


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        wd.generate_dataset(0, 1)
    with pytest.raises(ValueError):
        wd.init_wide(2, 2, 1, seed=0, sigma=0.0)
