#include "weightdyn/jacobian.hpp"

#include <cassert>
#include <cmath>

#include "weightdyn/errors.hpp"

namespace wdyn {

namespace {

// Writes one Jacobian block; in debug builds asserts that the block writer
// never touches an entry outside its declared index range.
struct BlockWriter {
  Eigen::MatrixXd& jac;
  Eigen::Index row_lo, row_hi, col_lo, col_hi;

  void add(Eigen::Index r, Eigen::Index c, double v) const {
    assert(r >= row_lo && r < row_hi && c >= col_lo && c < col_hi);
    jac(r, c) += v;
  }
};

// One sample's contribution, weight u = 1/batch_size. All 16 blocks are the
// partial derivatives of the four velocity equations with respect to the four
// parameter groups. Each block is written out from its own formula; factor
// orderings are kept identical across transpose partners so the assembled
// matrix comes out symmetric to the last bit.
void accumulate_sample(const StateIndexMap& m, const Params& p,
                       const Eigen::MatrixXd& inputs, const BatchTrace& t,
                       const Eigen::MatrixXd& gram32, Eigen::Index sample,
                       double u, Eigen::MatrixXd& jac,
                       Eigen::VectorXd& wg_buf, Eigen::MatrixXd& tbl_buf) {
  const Eigen::Index n1 = m.n1, n2 = m.n2, n3 = m.n3;
  const auto x = inputs.col(sample);
  const auto s = t.act.col(sample);
  const auto sp = t.act_d1.col(sample);
  const auto spp = t.act_d2.col(sample);
  const auto resid = t.resid.col(sample);  // a2 - y

  // wg_j = [w32^T (y - a2)]_j
  wg_buf.noalias() = -(p.w32.transpose() * resid);

  // Curvature table shared by the four hidden-hidden blocks:
  // T_jl = 2 (delta_jl sigma''(d_j) wg_j - sigma'(d_j) sigma'(d_l) [w32^T w32]_jl)
  for (Eigen::Index l = 0; l < n2; ++l)
    for (Eigen::Index j = 0; j < n2; ++j) {
      double v = -(sp[j] * sp[l]) * gram32(j, l);
      if (j == l) v += spp[j] * wg_buf[j];
      tbl_buf(j, l) = 2.0 * v;
    }

  // d w21_dot(j,i) / d w21(l,q) = x_i x_q T_jl
  {
    const BlockWriter w{jac, 0, m.w32_offset(), 0, m.w32_offset()};
    for (Eigen::Index q = 0; q < n1; ++q)
      for (Eigen::Index l = 0; l < n2; ++l)
        for (Eigen::Index i = 0; i < n1; ++i)
          for (Eigen::Index j = 0; j < n2; ++j)
            w.add(m.w21(j, i), m.w21(l, q), u * (x[i] * x[q]) * tbl_buf(j, l));
  }
  // d w21_dot(j,i) / d w32(n,l) = 2 x_i sigma'(d_j) (delta_jl (y-a2)_n - sigma(d_l) w32(n,j))
  {
    const BlockWriter w{jac, 0, m.w32_offset(), m.w32_offset(), m.b1_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index n = 0; n < n3; ++n)
        for (Eigen::Index i = 0; i < n1; ++i)
          for (Eigen::Index j = 0; j < n2; ++j) {
            const double dlt = (j == l) ? -resid[n] : 0.0;
            w.add(m.w21(j, i), m.w32(n, l),
                  u * (2.0 * x[i] * sp[j]) * (dlt - s[l] * p.w32(n, j)));
          }
  }
  // d w21_dot(j,i) / d b1_l = x_i T_jl
  {
    const BlockWriter w{jac, 0, m.w32_offset(), m.b1_offset(), m.b2_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j)
          w.add(m.w21(j, i), m.b1(l), u * x[i] * tbl_buf(j, l));
  }
  // d w21_dot(j,i) / d b2_n = -2 x_i sigma'(d_j) w32(n,j)
  {
    const BlockWriter w{jac, 0, m.w32_offset(), m.b2_offset(), m.dim()};
    for (Eigen::Index n = 0; n < n3; ++n)
      for (Eigen::Index i = 0; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j)
          w.add(m.w21(j, i), m.b2(n), u * -(2.0 * x[i] * sp[j]) * p.w32(n, j));
  }
  // d w32_dot(k,j) / d w21(l,q) = 2 x_q sigma'(d_l) (delta_jl (y-a2)_k - sigma(d_j) w32(k,l))
  {
    const BlockWriter w{jac, m.w32_offset(), m.b1_offset(), 0, m.w32_offset()};
    for (Eigen::Index q = 0; q < n1; ++q)
      for (Eigen::Index l = 0; l < n2; ++l)
        for (Eigen::Index j = 0; j < n2; ++j)
          for (Eigen::Index k = 0; k < n3; ++k) {
            const double dlt = (j == l) ? -resid[k] : 0.0;
            w.add(m.w32(k, j), m.w21(l, q),
                  u * (2.0 * x[q] * sp[l]) * (dlt - s[j] * p.w32(k, l)));
          }
  }
  // d w32_dot(k,j) / d w32(n,l) = -2 delta_kn sigma(d_j) sigma(d_l)
  {
    const BlockWriter w{jac, m.w32_offset(), m.b1_offset(), m.w32_offset(), m.b1_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index j = 0; j < n2; ++j) {
        const double v = u * -2.0 * (s[j] * s[l]);
        for (Eigen::Index k = 0; k < n3; ++k) w.add(m.w32(k, j), m.w32(k, l), v);
      }
  }
  // d w32_dot(k,j) / d b1_l = 2 sigma'(d_l) (delta_jl (y-a2)_k - sigma(d_j) w32(k,l))
  {
    const BlockWriter w{jac, m.w32_offset(), m.b1_offset(), m.b1_offset(), m.b2_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index j = 0; j < n2; ++j)
        for (Eigen::Index k = 0; k < n3; ++k) {
          const double dlt = (j == l) ? -resid[k] : 0.0;
          w.add(m.w32(k, j), m.b1(l), u * (2.0 * sp[l]) * (dlt - s[j] * p.w32(k, l)));
        }
  }
  // d w32_dot(k,j) / d b2_n = -2 delta_kn sigma(d_j)
  {
    const BlockWriter w{jac, m.w32_offset(), m.b1_offset(), m.b2_offset(), m.dim()};
    for (Eigen::Index j = 0; j < n2; ++j) {
      const double v = u * -2.0 * s[j];
      for (Eigen::Index k = 0; k < n3; ++k) w.add(m.w32(k, j), m.b2(k), v);
    }
  }
  // d b1_dot_j / d w21(l,q) = x_q T_jl
  {
    const BlockWriter w{jac, m.b1_offset(), m.b2_offset(), 0, m.w32_offset()};
    for (Eigen::Index q = 0; q < n1; ++q)
      for (Eigen::Index l = 0; l < n2; ++l)
        for (Eigen::Index j = 0; j < n2; ++j)
          w.add(m.b1(j), m.w21(l, q), u * x[q] * tbl_buf(j, l));
  }
  // d b1_dot_j / d w32(n,l) = 2 sigma'(d_j) (delta_jl (y-a2)_n - sigma(d_l) w32(n,j))
  {
    const BlockWriter w{jac, m.b1_offset(), m.b2_offset(), m.w32_offset(), m.b1_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index n = 0; n < n3; ++n)
        for (Eigen::Index j = 0; j < n2; ++j) {
          const double dlt = (j == l) ? -resid[n] : 0.0;
          w.add(m.b1(j), m.w32(n, l), u * (2.0 * sp[j]) * (dlt - s[l] * p.w32(n, j)));
        }
  }
  // d b1_dot_j / d b1_l = T_jl
  {
    const BlockWriter w{jac, m.b1_offset(), m.b2_offset(), m.b1_offset(), m.b2_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index j = 0; j < n2; ++j) w.add(m.b1(j), m.b1(l), u * tbl_buf(j, l));
  }
  // d b1_dot_j / d b2_n = -2 sigma'(d_j) w32(n,j)
  {
    const BlockWriter w{jac, m.b1_offset(), m.b2_offset(), m.b2_offset(), m.dim()};
    for (Eigen::Index n = 0; n < n3; ++n)
      for (Eigen::Index j = 0; j < n2; ++j)
        w.add(m.b1(j), m.b2(n), u * -(2.0 * sp[j]) * p.w32(n, j));
  }
  // d b2_dot_k / d w21(l,q) = -2 x_q sigma'(d_l) w32(k,l)
  {
    const BlockWriter w{jac, m.b2_offset(), m.dim(), 0, m.w32_offset()};
    for (Eigen::Index q = 0; q < n1; ++q)
      for (Eigen::Index l = 0; l < n2; ++l)
        for (Eigen::Index k = 0; k < n3; ++k)
          w.add(m.b2(k), m.w21(l, q), u * -(2.0 * x[q] * sp[l]) * p.w32(k, l));
  }
  // d b2_dot_k / d w32(n,l) = -2 delta_kn sigma(d_l)
  {
    const BlockWriter w{jac, m.b2_offset(), m.dim(), m.w32_offset(), m.b1_offset()};
    for (Eigen::Index l = 0; l < n2; ++l) {
      const double v = u * -2.0 * s[l];
      for (Eigen::Index k = 0; k < n3; ++k) w.add(m.b2(k), m.w32(k, l), v);
    }
  }
  // d b2_dot_k / d b1_l = -2 sigma'(d_l) w32(k,l)
  {
    const BlockWriter w{jac, m.b2_offset(), m.dim(), m.b1_offset(), m.b2_offset()};
    for (Eigen::Index l = 0; l < n2; ++l)
      for (Eigen::Index k = 0; k < n3; ++k)
        w.add(m.b2(k), m.b1(l), u * -(2.0 * sp[l]) * p.w32(k, l));
  }
  // d b2_dot_k / d b2_n = -2 delta_kn
  {
    const BlockWriter w{jac, m.b2_offset(), m.dim(), m.b2_offset(), m.dim()};
    for (Eigen::Index k = 0; k < n3; ++k) w.add(m.b2(k), m.b2(k), u * -2.0);
  }
}

}  // namespace

void jacobian_analytic(const Params& p, const Eigen::MatrixXd& inputs,
                       const BatchTrace& t, Eigen::MatrixXd& jac) {
  const StateIndexMap m(p);
  jac.setZero(m.dim(), m.dim());
  const Eigen::MatrixXd gram32 = p.w32.transpose() * p.w32;
  Eigen::VectorXd wg(m.n2);
  Eigen::MatrixXd tbl(m.n2, m.n2);
  const double u = 1.0 / static_cast<double>(inputs.cols());
  for (Eigen::Index sample = 0; sample < inputs.cols(); ++sample)
    accumulate_sample(m, p, inputs, t, gram32, sample, u, jac, wg, tbl);
}

Eigen::MatrixXd jacobian_analytic(const Params& p, const Batch& batch) {
  p.validate();
  validate_batch(p, batch);
  BatchTrace t;
  forward_batch(p, batch.inputs, batch.targets, t);
  Eigen::MatrixXd jac;
  jacobian_analytic(p, batch.inputs, t, jac);
  return jac;
}

Eigen::MatrixXd jacobian_fd(const Params& p, const Batch& batch, double h) {
  p.validate();
  validate_batch(p, batch);
  if (!(h > 0.0)) throw input_error("finite-difference step must be positive");
  const StateIndexMap m(p);
  const Eigen::VectorXd theta = flatten(p);
  Eigen::MatrixXd jac(m.dim(), m.dim());
  for (Eigen::Index col = 0; col < m.dim(); ++col) {
    const double step = h * std::max(1.0, std::abs(theta[col]));
    Eigen::VectorXd plus = theta, minus = theta;
    plus[col] += step;
    minus[col] -= step;
    const Eigen::VectorXd f_plus =
        flatten(vector_field(unflatten(plus, m, p.activation), batch));
    const Eigen::VectorXd f_minus =
        flatten(vector_field(unflatten(minus, m, p.activation), batch));
    jac.col(col) = (f_plus - f_minus) / (2.0 * step);
  }
  return jac;
}

JacobianCheck check_jacobian(const Params& p, const Batch& batch, double h) {
  const Eigen::MatrixXd analytic = jacobian_analytic(p, batch);
  const Eigen::MatrixXd fd = jacobian_fd(p, batch, h);
  JacobianCheck report;
  report.max_abs_error = (analytic - fd).cwiseAbs().maxCoeff();
  report.max_symmetry_defect = (analytic - analytic.transpose()).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace wdyn
