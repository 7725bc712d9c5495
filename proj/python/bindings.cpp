#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "weightdyn/bayes.hpp"
#include "weightdyn/ensemble.hpp"
#include "weightdyn/errors.hpp"
#include "weightdyn/io.hpp"
#include "weightdyn/jacobian.hpp"
#include "weightdyn/roc.hpp"
#include "weightdyn/stability.hpp"

namespace py = pybind11;
using namespace wdyn;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weight dynamics of three-layer networks: gradient-flow training, "
            "Lyapunov analysis and loss-outcome prediction";

  py::register_exception<input_error>(m, "InputError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Activation>(m, "Activation")
      .value("relu", Activation::relu)
      .value("tanh", Activation::tanh)
      .value("gelu", Activation::gelu);
  py::enum_<Initializer>(m, "Initializer")
      .value("he", Initializer::he)
      .value("wide", Initializer::wide);
  py::enum_<LabelDirection>(m, "LabelDirection")
      .value("below", LabelDirection::below)
      .value("above", LabelDirection::above);

  py::class_<ActivationValue>(m, "ActivationValue")
      .def_readonly("value", &ActivationValue::value)
      .def_readonly("d1", &ActivationValue::d1)
      .def_readonly("d2", &ActivationValue::d2)
      .def("__repr__", [](const ActivationValue& a) {
        return "ActivationValue(value=" + std::to_string(a.value) +
               ", d1=" + std::to_string(a.d1) + ", d2=" + std::to_string(a.d2) + ")";
      });
  m.def("activation_eval", &activation_eval, py::arg("kind"), py::arg("x"));

  py::class_<Params>(m, "Params")
      .def(py::init([](Eigen::MatrixXd w21, Eigen::MatrixXd w32, Eigen::VectorXd b1,
                       Eigen::VectorXd b2, Activation activation) {
             Params p{std::move(w21), std::move(w32), std::move(b1), std::move(b2), activation};
             p.validate();
             return p;
           }),
           py::arg("w21"), py::arg("w32"), py::arg("b1"), py::arg("b2"),
           py::arg("activation") = Activation::tanh)
      .def_readwrite("w21", &Params::w21)
      .def_readwrite("w32", &Params::w32)
      .def_readwrite("b1", &Params::b1)
      .def_readwrite("b2", &Params::b2)
      .def_readwrite("activation", &Params::activation)
      .def_static("zeros", &Params::zeros, py::arg("n1"), py::arg("n2"), py::arg("n3"),
                  py::arg("activation") = Activation::tanh)
      .def_property_readonly("dim", &Params::dim);

  py::class_<Batch>(m, "Batch")
      .def(py::init([](Eigen::MatrixXd inputs, Eigen::MatrixXd targets) {
             return Batch{std::move(inputs), std::move(targets)};
           }),
           py::arg("inputs"), py::arg("targets"))
      .def_readwrite("inputs", &Batch::inputs)
      .def_readwrite("targets", &Batch::targets);

  py::class_<ForwardTrace>(m, "ForwardTrace")
      .def_readonly("pre", &ForwardTrace::pre)
      .def_readonly("a1", &ForwardTrace::a1)
      .def_readonly("a2", &ForwardTrace::a2);

  m.def("forward", &forward, py::arg("params"), py::arg("x"));
  m.def("cost", py::overload_cast<const Params&, const Batch&>(&cost), py::arg("params"),
        py::arg("batch"));
  m.def("vector_field", py::overload_cast<const Params&, const Batch&>(&vector_field),
        py::arg("params"), py::arg("batch"));

  py::class_<StateIndexMap>(m, "StateIndexMap")
      .def(py::init<Eigen::Index, Eigen::Index, Eigen::Index>(), py::arg("n1"), py::arg("n2"),
           py::arg("n3"))
      .def_property_readonly("dim", &StateIndexMap::dim)
      .def("w21", &StateIndexMap::w21, py::arg("j"), py::arg("i"))
      .def("w32", &StateIndexMap::w32, py::arg("k"), py::arg("j"))
      .def("b1", &StateIndexMap::b1, py::arg("j"))
      .def("b2", &StateIndexMap::b2, py::arg("k"));

  m.def("flatten", &flatten, py::arg("params"));
  m.def("unflatten", &unflatten, py::arg("state"), py::arg("index_map"),
        py::arg("activation") = Activation::tanh);

  m.def("jacobian_analytic",
        py::overload_cast<const Params&, const Batch&>(&jacobian_analytic), py::arg("params"),
        py::arg("batch"));
  m.def("jacobian_fd", &jacobian_fd, py::arg("params"), py::arg("batch"), py::arg("h") = 1e-6);
  py::class_<JacobianCheck>(m, "JacobianCheck")
      .def_readonly("max_abs_error", &JacobianCheck::max_abs_error)
      .def_readonly("max_symmetry_defect", &JacobianCheck::max_symmetry_defect);
  m.def("check_jacobian", &check_jacobian, py::arg("params"), py::arg("batch"),
        py::arg("h") = 1e-6);

  m.def("ftle",
        py::overload_cast<const std::vector<Eigen::MatrixXd>&, std::size_t, std::size_t,
                          double>(&ftle),
        py::arg("rs"), py::arg("begin"), py::arg("end"), py::arg("dtau"));
  m.def("lyapunov_spectrum", &lyapunov_spectrum, py::arg("rs"), py::arg("dtau"));
  m.def("ginelli_clvs", &ginelli_clvs, py::arg("qs"), py::arg("rs"), py::arg("discard_tail"),
        py::arg("seed"));
  m.def("estimate_clvs_online", &estimate_clvs_online, py::arg("trailing_qs"),
        py::arg("trailing_rs"), py::arg("window_intervals"));
  py::class_<ClvAngles>(m, "ClvAngles")
      .def_readonly("cos_abs", &ClvAngles::cos_abs)
      .def_readonly("mean_cos_abs", &ClvAngles::mean_cos_abs);
  m.def("clv_angles", &clv_angles, py::arg("clvs"));

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("features", &Dataset::features)
      .def_readonly("targets", &Dataset::targets)
      .def_readonly("seed", &Dataset::seed)
      .def_property_readonly("size", &Dataset::size);
  m.def("generate_dataset", &generate_dataset, py::arg("n"), py::arg("seed"));
  m.def("init_he", &init_he, py::arg("n1"), py::arg("n2"), py::arg("n3"), py::arg("seed"),
        py::arg("activation") = Activation::tanh);
  m.def("init_wide", &init_wide, py::arg("n1"), py::arg("n2"), py::arg("n3"), py::arg("seed"),
        py::arg("sigma") = 20.0, py::arg("activation") = Activation::tanh);

  py::class_<Seeds>(m, "Seeds")
      .def(py::init<>())
      .def_readwrite("data", &Seeds::data)
      .def_readwrite("init", &Seeds::init)
      .def_readwrite("batch_order", &Seeds::batch_order)
      .def_readwrite("ginelli", &Seeds::ginelli);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("n1", &TrainConfig::n1)
      .def_readwrite("n2", &TrainConfig::n2)
      .def_readwrite("n3", &TrainConfig::n3)
      .def_readwrite("activation", &TrainConfig::activation)
      .def_readwrite("initializer", &TrainConfig::initializer)
      .def_readwrite("wide_sigma", &TrainConfig::wide_sigma)
      .def_readwrite("dt", &TrainConfig::dt)
      .def_readwrite("steps_per_interval", &TrainConfig::steps_per_interval)
      .def_readwrite("total_steps", &TrainConfig::total_steps)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("clv_window_intervals", &TrainConfig::clv_window_intervals)
      .def_readwrite("checkpoints", &TrainConfig::checkpoints)
      .def_readwrite("ginelli_discard_frac", &TrainConfig::ginelli_discard_frac)
      .def_readwrite("seeds", &TrainConfig::seeds)
      .def_property_readonly("total_intervals", &TrainConfig::total_intervals)
      .def_property_readonly("dtau", &TrainConfig::dtau)
      .def("resolved_checkpoints", &TrainConfig::resolved_checkpoints);

  py::class_<CheckpointRecord>(m, "CheckpointRecord")
      .def_readonly("interval", &CheckpointRecord::interval)
      .def_readonly("ftle", &CheckpointRecord::ftle)
      .def_readonly("cos_abs", &CheckpointRecord::cos_abs)
      .def_readonly("mean_cos_abs", &CheckpointRecord::mean_cos_abs)
      .def_readonly("loss", &CheckpointRecord::loss);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("run_id", &RunRecord::run_id)
      .def_readonly("config_hash", &RunRecord::config_hash)
      .def_readonly("diverged", &RunRecord::diverged)
      .def_readonly("c_f", &RunRecord::final_cost)
      .def_readonly("checkpoints", &RunRecord::checkpoints)
      .def_readonly("spectrum", &RunRecord::spectrum)
      .def_readonly("final_clv_cos_abs", &RunRecord::final_clv_cos_abs)
      .def_readonly("final_clv_mean_cos_abs", &RunRecord::final_clv_mean_cos_abs)
      .def_readonly("log_r_diag", &RunRecord::log_r_diag);

  m.def(
      "train_run",
      [](const TrainConfig& cfg, const Dataset& data) { return train_run(cfg, data); },
      py::arg("config"), py::arg("dataset"), py::call_guard<py::gil_scoped_release>());

  py::class_<EnsembleConfig>(m, "EnsembleConfig")
      .def(py::init<>())
      .def_readwrite("base", &EnsembleConfig::base)
      .def_readwrite("n_runs", &EnsembleConfig::n_runs)
      .def_readwrite("parallelism", &EnsembleConfig::parallelism)
      .def_readwrite("dataset_n", &EnsembleConfig::dataset_n);

  py::class_<OutcomeRow>(m, "OutcomeRow")
      .def_readonly("run_id", &OutcomeRow::run_id)
      .def_readonly("seed", &OutcomeRow::seed)
      .def_readonly("activation", &OutcomeRow::activation)
      .def_readonly("init", &OutcomeRow::init)
      .def_readonly("c_f", &OutcomeRow::c_f)
      .def_readonly("features", &OutcomeRow::features);

  py::class_<OutcomeTable>(m, "OutcomeTable")
      .def_readonly("columns", &OutcomeTable::columns)
      .def_readonly("rows", &OutcomeTable::rows)
      .def("feature_index", &OutcomeTable::feature_index, py::arg("column"));

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("table", &EnsembleResult::table)
      .def_readonly("spectra", &EnsembleResult::spectra)
      .def_readonly("n_diverged", &EnsembleResult::n_diverged);

  m.def("run_ensemble", &run_ensemble, py::arg("config"), py::arg("dataset"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<LabeledFeatures>(m, "LabeledFeatures")
      .def_readonly("feature_names", &LabeledFeatures::feature_names)
      .def_readonly("train_features", &LabeledFeatures::train_features)
      .def_readonly("test_features", &LabeledFeatures::test_features)
      .def_readonly("train_labels", &LabeledFeatures::train_labels)
      .def_readonly("test_labels", &LabeledFeatures::test_labels)
      .def_readonly("n_dropped_nonfinite", &LabeledFeatures::n_dropped_nonfinite);
  m.def("label_outcomes", &label_outcomes, py::arg("table"), py::arg("threshold"),
        py::arg("direction"), py::arg("feature_columns"));

  py::class_<BayesModel>(m, "BayesModel")
      .def_readonly("bins", &BayesModel::bins)
      .def_readonly("feature_names", &BayesModel::feature_names)
      .def("bin_of", &BayesModel::bin_of, py::arg("feature"), py::arg("value"));
  m.def("fit_naive_bayes", &fit_naive_bayes, py::arg("data"), py::arg("bins") = 20);
  m.def("predict_posterior",
        py::overload_cast<const BayesModel&, const Eigen::VectorXd&>(&predict_posterior),
        py::arg("model"), py::arg("features"));
  m.def("predict_posterior_rows",
        py::overload_cast<const BayesModel&, const Eigen::MatrixXd&>(&predict_posterior),
        py::arg("model"), py::arg("rows"));

  py::class_<RocCurve>(m, "RocCurve")
      .def_readonly("fpr", &RocCurve::fpr)
      .def_readonly("tpr", &RocCurve::tpr)
      .def_readonly("auc", &RocCurve::auc);
  m.def("roc_curve", &roc_curve, py::arg("scores"), py::arg("labels"));

  py::class_<Contingency>(m, "Contingency")
      .def_readonly("tp", &Contingency::tp)
      .def_readonly("fp", &Contingency::fp)
      .def_readonly("tn", &Contingency::tn)
      .def_readonly("fn", &Contingency::fn);
  m.def("contingency_table", &contingency_table, py::arg("scores"), py::arg("labels"),
        py::arg("threshold"));

  m.def("write_dataset_csv", &write_dataset_csv, py::arg("dataset"), py::arg("path"));
  m.def("read_dataset_csv", &read_dataset_csv, py::arg("path"));
  m.def("write_outcome_csv", &write_outcome_csv, py::arg("table"), py::arg("path"));
  m.def("read_outcome_csv", &read_outcome_csv, py::arg("path"));
  m.def("write_run_record_json", &write_run_record_json, py::arg("record"), py::arg("path"));
}
