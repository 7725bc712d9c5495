#pragma once

#include <random>

#include <Eigen/Dense>

#include "weightdyn/network.hpp"
#include "weightdyn/state_map.hpp"

namespace wdyn::test {

inline Params random_params(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
                            Activation act, std::mt19937_64& rng, double range = 2.0) {
  std::uniform_real_distribution<double> u(-range, range);
  Params p = Params::zeros(n1, n2, n3, act);
  for (Eigen::Index c = 0; c < n1; ++c)
    for (Eigen::Index r = 0; r < n2; ++r) p.w21(r, c) = u(rng);
  for (Eigen::Index c = 0; c < n2; ++c)
    for (Eigen::Index r = 0; r < n3; ++r) p.w32(r, c) = u(rng);
  for (Eigen::Index j = 0; j < n2; ++j) p.b1[j] = u(rng);
  for (Eigen::Index k = 0; k < n3; ++k) p.b2[k] = u(rng);
  return p;
}

inline Batch random_batch(Eigen::Index n1, Eigen::Index n3, Eigen::Index n,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Batch b;
  b.inputs.resize(n1, n);
  b.targets.resize(n3, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n1; ++r) b.inputs(r, c) = gauss(rng);
    for (Eigen::Index r = 0; r < n3; ++r) b.targets(r, c) = gauss(rng);
  }
  return b;
}

// Keeps every hidden pre-activation away from the ReLU kink.
inline bool away_from_kinks(const Params& p, const Batch& b, double margin) {
  for (Eigen::Index c = 0; c < b.size(); ++c) {
    const Eigen::VectorXd pre = p.w21 * b.inputs.col(c) + p.b1;
    if (pre.cwiseAbs().minCoeff() <= margin) return false;
  }
  return true;
}

// Central-difference gradient of the cost, the independent oracle for the
// vector field.
inline Eigen::VectorXd fd_cost_gradient(const Params& p, const Batch& batch, double h = 1e-6) {
  const StateIndexMap m(p);
  const Eigen::VectorXd theta = flatten(p);
  Eigen::VectorXd grad(m.dim());
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    Eigen::VectorXd plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    grad[i] = (cost(unflatten(plus, m, p.activation), batch) -
               cost(unflatten(minus, m, p.activation), batch)) /
              (2 * h);
  }
  return grad;
}

}  // namespace wdyn::test
