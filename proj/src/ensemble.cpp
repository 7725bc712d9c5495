#include "weightdyn/ensemble.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "weightdyn/errors.hpp"

namespace wdyn {

void EnsembleConfig::validate() const {
  if (n_runs < 1) throw input_error("n_runs must be >= 1");
  if (parallelism < 1) throw input_error("parallelism must be >= 1");
  if (dataset_n < 1) throw input_error("dataset size must be >= 1");
  base.validate(dataset_n);
}

std::vector<std::string> OutcomeTable::make_columns(const std::vector<long>& checkpoints,
                                                    Eigen::Index dim) {
  std::vector<std::string> cols = {"run_id", "seed", "activation", "init", "c_f"};
  for (long ck : checkpoints)
    for (Eigen::Index q = 1; q <= dim; ++q)
      cols.push_back("ftle" + std::to_string(q) + "_ck" + std::to_string(ck));
  for (long ck : checkpoints) cols.push_back("meancos_ck" + std::to_string(ck));
  for (long ck : checkpoints) cols.push_back("loss_ck" + std::to_string(ck));
  return cols;
}

std::size_t OutcomeTable::feature_index(const std::string& column) const {
  for (std::size_t i = 5; i < columns.size(); ++i)
    if (columns[i] == column) return i - 5;
  throw input_error("unknown outcome column '" + column + "'");
}

std::vector<double> checkpoint_features(const RunRecord& rec) {
  std::vector<double> f;
  for (const CheckpointRecord& ck : rec.checkpoints)
    for (Eigen::Index q = 0; q < ck.ftle.size(); ++q) f.push_back(ck.ftle[q]);
  for (const CheckpointRecord& ck : rec.checkpoints) f.push_back(ck.mean_cos_abs);
  for (const CheckpointRecord& ck : rec.checkpoints) f.push_back(ck.loss);
  return f;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const Dataset& data) {
  cfg.validate();
  if (data.size() != cfg.dataset_n)
    throw input_error("dataset size does not match the ensemble configuration");
  const long n_runs = cfg.n_runs;
  const Eigen::Index dim =
      cfg.base.n1 * cfg.base.n2 + cfg.base.n2 * cfg.base.n3 + cfg.base.n2 + cfg.base.n3;

  EnsembleResult result;
  result.table.columns = OutcomeTable::make_columns(cfg.base.resolved_checkpoints(), dim);
  result.table.rows.resize(n_runs);
  result.spectra.resize(n_runs, dim);

  std::atomic<long> next{0};
  std::atomic<long> diverged{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    for (;;) {
      const long run_id = next.fetch_add(1);
      if (run_id >= n_runs) return;
      try {
        TrainConfig run_cfg = cfg.base;
        run_cfg.seeds.init = cfg.base.seeds.init + static_cast<std::uint64_t>(run_id);
        run_cfg.seeds.batch_order =
            cfg.base.seeds.batch_order + static_cast<std::uint64_t>(run_id);
        run_cfg.seeds.ginelli = cfg.base.seeds.ginelli + static_cast<std::uint64_t>(run_id);
        RunRecord rec = train_run(run_cfg, data);
        rec.run_id = run_id;
        if (rec.diverged) diverged.fetch_add(1);

        OutcomeRow& row = result.table.rows[run_id];
        row.run_id = run_id;
        row.seed = run_cfg.seeds.init;
        row.activation = std::string(to_string(cfg.base.activation));
        row.init = std::string(to_string(cfg.base.initializer));
        row.c_f = rec.final_cost;
        row.features = checkpoint_features(rec);
        result.spectra.row(run_id) = rec.spectrum.transpose();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (cfg.parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int threads = static_cast<int>(std::min<long>(cfg.parallelism, n_runs));
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  result.n_diverged = diverged.load();
  return result;
}

}  // namespace wdyn
