#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "weightdyn/errors.hpp"

namespace wdyn {

// Orthonormal basis of tangent perturbations, re-orthonormalized every
// interval (Benettin). Column q spans the q-th Gram-Schmidt direction.
struct TangentFrame {
  Eigen::MatrixXd q;
  long interval = 0;

  static TangentFrame identity(Eigen::Index dim);
};

// q <- (I + dt J) q. scratch must have the same shape as q.
void tangent_step(Eigen::MatrixXd& q, const Eigen::MatrixXd& jac, double dt,
                  Eigen::MatrixXd& scratch);

// QR-factorizes the frame in place; returns R with positive diagonal
// (column signs of Q absorb the convention).
Eigen::MatrixXd orthonormalize(TangentFrame& frame);

// One Benettin interval: applies steps_per_interval explicit-Euler tangent
// maps (I + dt J_s) to the frame, then re-orthonormalizes and returns R.
// jacobian_at_step(s) must yield the Jacobian of step s, in step order, and
// may mutate external state (the training loop advances the weights there).
// Throws numerical_error on non-finite Jacobian entries.
template <class JacobianProvider>
Eigen::MatrixXd propagate_interval(TangentFrame& frame, JacobianProvider&& jacobian_at_step,
                                   double dt, int steps_per_interval) {
  if (!(dt > 0.0)) throw input_error("dt must be positive");
  if (steps_per_interval < 1) throw input_error("steps_per_interval must be >= 1");
  Eigen::MatrixXd scratch(frame.q.rows(), frame.q.cols());
  for (int s = 0; s < steps_per_interval; ++s) {
    const Eigen::MatrixXd& jac = jacobian_at_step(s);
    if (!jac.allFinite())
      throw numerical_error("non-finite Jacobian at tangent step " + std::to_string(s) +
                            " of interval " + std::to_string(frame.interval));
    tangent_step(frame.q, jac, dt, scratch);
  }
  Eigen::MatrixXd r = orthonormalize(frame);
  ++frame.interval;
  return r;
}

// Finite-time Lyapunov exponents over rs[begin, end):
// lambda_q = sum log R_qq / ((end - begin) * dtau).
Eigen::VectorXd ftle(const std::vector<Eigen::MatrixXd>& rs, std::size_t begin,
                     std::size_t end, double dtau);
Eigen::VectorXd ftle(const std::vector<Eigen::MatrixXd>& rs, double dtau);

// Same, from precomputed per-interval log-diagonals.
Eigen::VectorXd ftle_from_logs(const std::vector<Eigen::VectorXd>& log_r_diag,
                               std::size_t begin, std::size_t end, double dtau);

// Whole-run spectrum, no transient discarded.
Eigen::VectorXd lyapunov_spectrum(const std::vector<Eigen::MatrixXd>& rs, double dtau);

// Covariant Lyapunov vectors by backward iteration (Ginelli). qs[i]/rs[i] are
// the frame and triangular factor after interval i. A random upper-triangular
// coefficient matrix (unit diagonal, unit columns) starts at the final
// interval; C <- normalize_columns(R_i^{-1} C) walks backward. Returns unit
// CLV matrices for intervals [0, n - discard_tail); the trailing intervals
// only serve the convergence of the iteration.
std::vector<Eigen::MatrixXd> ginelli_clvs(const std::vector<Eigen::MatrixXd>& qs,
                                          const std::vector<Eigen::MatrixXd>& rs,
                                          long discard_tail, std::uint64_t seed);

// Short-window CLV estimate usable during a run: backward iteration
// restricted to the trailing window, coefficients initialized to identity at
// the window end. Returns the CLV matrix at the *oldest* buffered interval,
// so the estimate trails the current step by window_intervals - 1 intervals
// and uses no future data. window_intervals == 1 degenerates to the
// Gram-Schmidt basis itself.
Eigen::MatrixXd estimate_clvs_online(const std::vector<Eigen::MatrixXd>& trailing_qs,
                                     const std::vector<Eigen::MatrixXd>& trailing_rs,
                                     int window_intervals);

struct ClvAngles {
  Eigen::MatrixXd cos_abs;  // |v_i . v_j|
  double mean_cos_abs = 0.0;  // mean over the D(D-1)/2 unordered pairs
};

ClvAngles clv_angles(const Eigen::MatrixXd& clvs);

}  // namespace wdyn
