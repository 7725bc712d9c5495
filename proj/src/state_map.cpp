#include "weightdyn/state_map.hpp"

#include <string>

#include "weightdyn/errors.hpp"

namespace wdyn {

StateIndexMap::StateIndexMap(Eigen::Index n1_, Eigen::Index n2_, Eigen::Index n3_)
    : n1(n1_), n2(n2_), n3(n3_) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw input_error("layer sizes must be positive");
}

Eigen::VectorXd flatten(const Params& p) {
  p.validate();
  const StateIndexMap m(p);
  Eigen::VectorXd v(m.dim());
  // Eigen matrices are column-major, so the column-by-column layout is a
  // straight memory copy per segment.
  v.segment(m.w21_offset(), m.n1 * m.n2) =
      Eigen::Map<const Eigen::VectorXd>(p.w21.data(), p.w21.size());
  v.segment(m.w32_offset(), m.n2 * m.n3) =
      Eigen::Map<const Eigen::VectorXd>(p.w32.data(), p.w32.size());
  v.segment(m.b1_offset(), m.n2) = p.b1;
  v.segment(m.b2_offset(), m.n3) = p.b2;
  return v;
}

Params unflatten(const Eigen::VectorXd& v, const StateIndexMap& map, Activation activation) {
  if (v.size() != map.dim())
    throw input_error("state vector length " + std::to_string(v.size()) +
                      " does not match D = " + std::to_string(map.dim()));
  Params p = Params::zeros(map.n1, map.n2, map.n3, activation);
  p.w21 = Eigen::Map<const Eigen::MatrixXd>(v.data() + map.w21_offset(), map.n2, map.n1);
  p.w32 = Eigen::Map<const Eigen::MatrixXd>(v.data() + map.w32_offset(), map.n3, map.n2);
  p.b1 = v.segment(map.b1_offset(), map.n2);
  p.b2 = v.segment(map.b2_offset(), map.n3);
  return p;
}

}  // namespace wdyn
