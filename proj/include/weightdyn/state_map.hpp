#pragma once

#include <Eigen/Dense>

#include "weightdyn/network.hpp"

namespace wdyn {

// Layout of the flat state vector: consecutively arranged columns of w21,
// then w32, then b1, then b2.
struct StateIndexMap {
  Eigen::Index n1 = 0, n2 = 0, n3 = 0;

  StateIndexMap() = default;
  StateIndexMap(Eigen::Index n1_, Eigen::Index n2_, Eigen::Index n3_);
  explicit StateIndexMap(const Params& p) : StateIndexMap(p.n1(), p.n2(), p.n3()) {}

  Eigen::Index dim() const { return n1 * n2 + n2 * n3 + n2 + n3; }
  Eigen::Index w21_offset() const { return 0; }
  Eigen::Index w32_offset() const { return n1 * n2; }
  Eigen::Index b1_offset() const { return n1 * n2 + n2 * n3; }
  Eigen::Index b2_offset() const { return n1 * n2 + n2 * n3 + n2; }

  Eigen::Index w21(Eigen::Index j, Eigen::Index i) const { return i * n2 + j; }
  Eigen::Index w32(Eigen::Index k, Eigen::Index j) const { return w32_offset() + j * n3 + k; }
  Eigen::Index b1(Eigen::Index j) const { return b1_offset() + j; }
  Eigen::Index b2(Eigen::Index k) const { return b2_offset() + k; }
};

Eigen::VectorXd flatten(const Params& p);

// Inverse of flatten; throws input_error if v has the wrong length.
Params unflatten(const Eigen::VectorXd& v, const StateIndexMap& map,
                 Activation activation = Activation::tanh);

}  // namespace wdyn
