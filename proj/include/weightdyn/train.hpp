#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weightdyn/dataset.hpp"
#include "weightdyn/network.hpp"

namespace wdyn {

struct Seeds {
  std::uint64_t data = 0;
  std::uint64_t init = 1;
  std::uint64_t batch_order = 2;
  std::uint64_t ginelli = 3;
};

enum class Initializer { he, wide };

std::string_view to_string(Initializer kind);
Initializer initializer_from_string(std::string_view name);

struct TrainConfig {
  Eigen::Index n1 = 2, n2 = 2, n3 = 1;
  Activation activation = Activation::tanh;
  Initializer initializer = Initializer::he;
  double wide_sigma = 20.0;
  double dt = 3.0e-5;
  int steps_per_interval = 20;
  long total_steps = 40000;
  Eigen::Index batch_size = 32;
  int clv_window_intervals = 10;
  // Orthogonalization-interval counts; empty selects the default
  // {500, 1000, 2000, 3000} restricted to the run length.
  std::vector<long> checkpoints;
  double ginelli_discard_frac = 0.2;
  Seeds seeds;

  long total_intervals() const { return total_steps / steps_per_interval; }
  double dtau() const { return dt * steps_per_interval; }
  long ginelli_discard_tail() const;
  std::vector<long> resolved_checkpoints() const;

  // Throws input_error on inconsistent settings (including explicit
  // checkpoints outside [clv_window_intervals, total_intervals]).
  void validate(Eigen::Index dataset_n) const;
};

// Short stable fingerprint of every field that influences a run.
std::string config_fingerprint(const TrainConfig& cfg);

struct CheckpointRecord {
  long interval = 0;
  Eigen::VectorXd ftle;      // trailing window since the previous checkpoint
  Eigen::MatrixXd cos_abs;   // online-estimated CLV angles
  double mean_cos_abs = std::numeric_limits<double>::quiet_NaN();
  double loss = std::numeric_limits<double>::quiet_NaN();  // cost over the full dataset
};

struct RunRecord {
  long run_id = 0;
  std::string config_hash;
  bool diverged = false;
  double final_cost = 0.0;  // c_f; +infinity sentinel for diverged runs
  std::vector<CheckpointRecord> checkpoints;
  Eigen::VectorXd spectrum;            // whole-run exponents
  Eigen::MatrixXd final_clv_cos_abs;   // Ginelli angles at the last emitted interval
  double final_clv_mean_cos_abs = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::VectorXd> log_r_diag;  // per interval, for offline recomputation
};

// Consecutive slices of a fresh shuffle per epoch; the final slice may be
// shorter (n mod batch_size) and is used as-is.
class BatchSchedule {
 public:
  BatchSchedule(Eigen::Index n, Eigen::Index batch_size, std::uint64_t seed);

  Eigen::Index steps_per_epoch() const { return steps_per_epoch_; }
  // Returns the sample indices of the next batch.
  const std::vector<Eigen::Index>& next();

 private:
  Eigen::Index n_, batch_size_, steps_per_epoch_, pos_ = 0;
  std::mt19937_64 rng_;
  std::vector<Eigen::Index> perm_;
  std::vector<Eigen::Index> batch_;
};

// Test/diagnostic hook into the training loop. on_step fires once per
// integration step with the pre-update parameters and that step's batch
// Jacobian; on_interval fires after each QR with the fresh frame and factor.
struct TrainObserver {
  virtual ~TrainObserver() = default;
  virtual void on_step(long /*step*/, const Params& /*params*/, const Eigen::MatrixXd& /*jac*/) {}
  virtual void on_interval(long /*interval*/, const Eigen::MatrixXd& /*q*/,
                           const Eigen::MatrixXd& /*r*/) {}
};

// Integrates the weight dynamics and the tangent frame side by side:
// explicit-Euler weight updates over shuffled mini-batches, the tangent frame
// advanced with the same batch's Jacobian each step, QR every
// steps_per_interval steps, FTLE/CLV statistics at the configured
// checkpoints, whole-run spectrum and final Ginelli angles at the end.
// A run that turns non-finite is marked diverged (c_f = +inf) and returned,
// never thrown.
RunRecord train_run(const TrainConfig& cfg, const Dataset& data,
                    TrainObserver* observer = nullptr);

}  // namespace wdyn
