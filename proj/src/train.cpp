#include "weightdyn/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "weightdyn/errors.hpp"
#include "weightdyn/jacobian.hpp"
#include "weightdyn/stability.hpp"

namespace wdyn {

std::string_view to_string(Initializer kind) {
  return kind == Initializer::he ? "he" : "wide";
}

Initializer initializer_from_string(std::string_view name) {
  if (name == "he") return Initializer::he;
  if (name == "wide") return Initializer::wide;
  throw input_error("unknown initializer '" + std::string(name) + "' (expected he or wide)");
}

long TrainConfig::ginelli_discard_tail() const {
  const long n = total_intervals();
  return std::max<long>(1, std::lround(ginelli_discard_frac * static_cast<double>(n)));
}

std::vector<long> TrainConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<long> out;
  for (long ck : {500L, 1000L, 2000L, 3000L})
    if (ck >= clv_window_intervals && ck <= total_intervals()) out.push_back(ck);
  return out;
}

void TrainConfig::validate(Eigen::Index dataset_n) const {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw input_error("layer sizes must be positive");
  if (!(dt > 0.0)) throw input_error("dt must be positive");
  if (steps_per_interval < 1) throw input_error("steps_per_interval must be >= 1");
  if (total_steps < 1) throw input_error("total_steps must be >= 1");
  if (total_steps % steps_per_interval != 0)
    throw input_error("total_steps must be divisible by steps_per_interval");
  if (batch_size < 1) throw input_error("batch_size must be >= 1");
  if (dataset_n >= 0 && batch_size > dataset_n)
    throw input_error("batch_size exceeds dataset size");
  if (clv_window_intervals < 1) throw input_error("clv_window_intervals must be >= 1");
  if (initializer == Initializer::wide && !(wide_sigma > 0.0))
    throw input_error("wide-range sigma must be positive");
  if (!(ginelli_discard_frac >= 0.0 && ginelli_discard_frac < 1.0))
    throw input_error("ginelli_discard_frac must lie in [0, 1)");
  if (total_intervals() <= ginelli_discard_tail())
    throw input_error("run too short for the Ginelli discard tail");
  const auto cks = resolved_checkpoints();
  long prev = 0;
  for (long ck : cks) {
    if (ck <= prev) throw input_error("checkpoints must be strictly increasing");
    if (ck < clv_window_intervals)
      throw input_error("checkpoint " + std::to_string(ck) +
                        " precedes a full CLV window of " +
                        std::to_string(clv_window_intervals) + " intervals");
    if (ck > total_intervals())
      throw input_error("checkpoint " + std::to_string(ck) + " exceeds the run length of " +
                        std::to_string(total_intervals()) + " intervals");
    prev = ck;
  }
}

std::string config_fingerprint(const TrainConfig& cfg) {
  std::ostringstream os;
  os << cfg.n1 << '|' << cfg.n2 << '|' << cfg.n3 << '|' << to_string(cfg.activation) << '|'
     << to_string(cfg.initializer) << '|' << cfg.wide_sigma << '|' << cfg.dt << '|'
     << cfg.steps_per_interval << '|' << cfg.total_steps << '|' << cfg.batch_size << '|'
     << cfg.clv_window_intervals << '|' << cfg.ginelli_discard_frac << '|' << cfg.seeds.data
     << '|' << cfg.seeds.init << '|' << cfg.seeds.batch_order << '|' << cfg.seeds.ginelli;
  for (long ck : cfg.resolved_checkpoints()) os << '|' << ck;
  const std::string s = os.str();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

BatchSchedule::BatchSchedule(Eigen::Index n, Eigen::Index batch_size, std::uint64_t seed)
    : n_(n),
      batch_size_(batch_size),
      steps_per_epoch_((n + batch_size - 1) / batch_size),
      rng_(seed),
      perm_(n) {
  if (n < 1 || batch_size < 1 || batch_size > n)
    throw input_error("batch size must lie in [1, n]");
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
}

const std::vector<Eigen::Index>& BatchSchedule::next() {
  if (pos_ == 0) std::shuffle(perm_.begin(), perm_.end(), rng_);
  const Eigen::Index base = pos_ * batch_size_;
  const Eigen::Index count = std::min(batch_size_, n_ - base);
  batch_.assign(perm_.begin() + base, perm_.begin() + base + count);
  pos_ = (pos_ + 1) % steps_per_epoch_;
  return batch_;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct StepWorkspace {
  Eigen::MatrixXd xb, yb;
  BatchTrace trace;

  StepWorkspace(Eigen::Index n1, Eigen::Index n3, Eigen::Index b) : xb(n1, b), yb(n3, b) {}
};

void apply_velocity(Params& p, const Params& vel, double dt) {
  p.w21 += dt * vel.w21;
  p.w32 += dt * vel.w32;
  p.b1 += dt * vel.b1;
  p.b2 += dt * vel.b2;
}

}  // namespace

RunRecord train_run(const TrainConfig& cfg, const Dataset& data, TrainObserver* observer) {
  cfg.validate(data.size());
  const Eigen::Index n = data.size();
  const Eigen::Index dim = cfg.n1 * cfg.n2 + cfg.n2 * cfg.n3 + cfg.n2 + cfg.n3;
  const long n_intervals = cfg.total_intervals();
  const double dtau = cfg.dtau();
  const long steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const Eigen::Index tail_size = n - (steps_per_epoch - 1) * cfg.batch_size;
  const std::vector<long> cks = cfg.resolved_checkpoints();

  Params p = cfg.initializer == Initializer::he
                 ? init_he(cfg.n1, cfg.n2, cfg.n3, cfg.seeds.init, cfg.activation)
                 : init_wide(cfg.n1, cfg.n2, cfg.n3, cfg.seeds.init, cfg.wide_sigma,
                             cfg.activation);
  Params vel = Params::zeros(cfg.n1, cfg.n2, cfg.n3, cfg.activation);

  RunRecord rec;
  rec.config_hash = config_fingerprint(cfg);
  rec.log_r_diag.reserve(n_intervals);

  BatchSchedule schedule(n, cfg.batch_size, cfg.seeds.batch_order);

  StepWorkspace full(cfg.n1, cfg.n3, cfg.batch_size);
  StepWorkspace tail(cfg.n1, cfg.n3, tail_size);
  Eigen::MatrixXd jac(dim, dim);
  BatchTrace whole_trace;
  const auto full_dataset_cost = [&]() {
    forward_batch(p, data.features, data.targets, whole_trace);
    return cost(p, whole_trace);
  };

  TangentFrame frame = TangentFrame::identity(dim);
  std::vector<Eigen::MatrixXd> qs, rs;
  qs.reserve(n_intervals);
  rs.reserve(n_intervals);
  std::deque<Eigen::MatrixXd> trail_q, trail_r;

  long step = 0;
  const auto jacobian_provider = [&](int) -> const Eigen::MatrixXd& {
    const std::vector<Eigen::Index>& indices = schedule.next();
    StepWorkspace& ws =
        indices.size() == static_cast<std::size_t>(cfg.batch_size) ? full : tail;
    for (Eigen::Index t = 0; t < ws.xb.cols(); ++t) {
      ws.xb.col(t) = data.features.col(indices[t]);
      ws.yb.col(t) = data.targets.col(indices[t]);
    }
    forward_batch(p, ws.xb, ws.yb, ws.trace);
    vector_field(p, ws.xb, ws.trace, vel);
    jacobian_analytic(p, ws.xb, ws.trace, jac);
    if (observer) observer->on_step(step, p, jac);
    apply_velocity(p, vel, cfg.dt);
    ++step;
    return jac;
  };

  std::size_t next_ck = 0;
  long completed = 0;
  try {
    for (long interval = 0; interval < n_intervals; ++interval) {
      Eigen::MatrixXd r = propagate_interval(frame, jacobian_provider, cfg.dt,
                                             cfg.steps_per_interval);
      if (observer) observer->on_interval(interval, frame.q, r);
      rec.log_r_diag.push_back(r.diagonal().array().log());
      qs.push_back(frame.q);
      rs.push_back(r);
      trail_q.push_back(frame.q);
      trail_r.push_back(std::move(r));
      while (trail_q.size() > static_cast<std::size_t>(cfg.clv_window_intervals)) {
        trail_q.pop_front();
        trail_r.pop_front();
      }
      completed = interval + 1;

      if (next_ck < cks.size() && completed == cks[next_ck]) {
        CheckpointRecord ck;
        ck.interval = completed;
        const long prev = next_ck == 0 ? 0 : cks[next_ck - 1];
        ck.ftle = ftle_from_logs(rec.log_r_diag, prev, completed, dtau);
        const std::vector<Eigen::MatrixXd> wq(trail_q.begin(), trail_q.end());
        const std::vector<Eigen::MatrixXd> wr(trail_r.begin(), trail_r.end());
        const Eigen::MatrixXd est = estimate_clvs_online(wq, wr, cfg.clv_window_intervals);
        const ClvAngles angles = clv_angles(est);
        ck.cos_abs = angles.cos_abs;
        ck.mean_cos_abs = angles.mean_cos_abs;
        ck.loss = full_dataset_cost();
        rec.checkpoints.push_back(std::move(ck));
        ++next_ck;
        if (!std::isfinite(rec.checkpoints.back().loss))
          throw numerical_error("non-finite loss at checkpoint " + std::to_string(completed));
      }
    }
    rec.final_cost = full_dataset_cost();
    if (!std::isfinite(rec.final_cost))
      throw numerical_error("non-finite final loss");
  } catch (const numerical_error&) {
    rec.diverged = true;
    rec.final_cost = std::numeric_limits<double>::infinity();
  }

  // Unreached checkpoints of a diverged run stay in the record as NaN rows so
  // the checkpoint count always matches the configuration.
  for (std::size_t i = rec.checkpoints.size(); i < cks.size(); ++i) {
    CheckpointRecord ck;
    ck.interval = cks[i];
    ck.ftle = Eigen::VectorXd::Constant(dim, kNaN);
    ck.cos_abs = Eigen::MatrixXd::Constant(dim, dim, kNaN);
    rec.checkpoints.push_back(std::move(ck));
  }

  if (completed > 0) {
    rec.spectrum = ftle_from_logs(rec.log_r_diag, 0, completed, dtau);
  } else {
    rec.spectrum = Eigen::VectorXd::Constant(dim, kNaN);
  }

  const long ginelli_tail = cfg.ginelli_discard_tail();
  if (completed > ginelli_tail) {
    const auto clvs = ginelli_clvs(qs, rs, ginelli_tail, cfg.seeds.ginelli);
    const ClvAngles angles = clv_angles(clvs.back());
    rec.final_clv_cos_abs = angles.cos_abs;
    rec.final_clv_mean_cos_abs = angles.mean_cos_abs;
  } else {
    rec.final_clv_cos_abs = Eigen::MatrixXd::Constant(dim, dim, kNaN);
    rec.final_clv_mean_cos_abs = kNaN;
  }
  return rec;
}

}  // namespace wdyn
