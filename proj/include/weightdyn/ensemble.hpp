#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weightdyn/train.hpp"

namespace wdyn {

struct EnsembleConfig {
  TrainConfig base;
  long n_runs = 200;
  int parallelism = 1;
  Eigen::Index dataset_n = 1000;

  void validate() const;
};

// One row per run: identity and label columns, then the flattened checkpoint
// features (all FTLE components per checkpoint, then the mean |cos| of the
// estimated CLV angles per checkpoint, then the loss per checkpoint).
struct OutcomeRow {
  long run_id = 0;
  std::uint64_t seed = 0;
  std::string activation;
  std::string init;
  double c_f = 0.0;
  std::vector<double> features;
};

struct OutcomeTable {
  std::vector<std::string> columns;  // full header, starting run_id,seed,activation,init,c_f
  std::vector<OutcomeRow> rows;

  static std::vector<std::string> make_columns(const std::vector<long>& checkpoints,
                                               Eigen::Index dim);
  // Index into OutcomeRow::features (i.e. already excluding the five fixed
  // columns); throws input_error on unknown names.
  std::size_t feature_index(const std::string& column) const;
};

std::vector<double> checkpoint_features(const RunRecord& rec);

struct EnsembleResult {
  OutcomeTable table;
  Eigen::MatrixXd spectra;  // n_runs x D whole-run exponents, row per run
  long n_diverged = 0;
};

// Trains n_runs copies over a shared dataset, per-run seeds derived as
// base seed + run_id. Rows come back sorted by run_id and are bit-identical
// for any parallelism degree. Diverged runs are kept (c_f = +inf).
EnsembleResult run_ensemble(const EnsembleConfig& cfg, const Dataset& data);

}  // namespace wdyn
