#include "weightdyn/stability.hpp"

#include <cmath>
#include <random>
#include <string>

namespace wdyn {

TangentFrame TangentFrame::identity(Eigen::Index dim) {
  if (dim < 1) throw input_error("tangent dimension must be positive");
  TangentFrame f;
  f.q = Eigen::MatrixXd::Identity(dim, dim);
  return f;
}

void tangent_step(Eigen::MatrixXd& q, const Eigen::MatrixXd& jac, double dt,
                  Eigen::MatrixXd& scratch) {
  scratch.noalias() = jac * q;
  q += dt * scratch;
}

Eigen::MatrixXd orthonormalize(TangentFrame& frame) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame.q);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  frame.q = qr.householderQ();
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    const double d = r(c, c);
    if (d == 0.0 || !std::isfinite(d))
      throw numerical_error("rank-deficient tangent frame at interval " +
                            std::to_string(frame.interval));
    if (d < 0.0) {
      r.row(c) = -r.row(c);
      frame.q.col(c) = -frame.q.col(c);
    }
  }
  return r;
}

Eigen::VectorXd ftle_from_logs(const std::vector<Eigen::VectorXd>& log_r_diag,
                               std::size_t begin, std::size_t end, double dtau) {
  if (begin >= end || end > log_r_diag.size())
    throw input_error("empty or out-of-range FTLE window");
  if (!(dtau > 0.0)) throw input_error("dtau must be positive");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(log_r_diag[begin].size());
  for (std::size_t i = begin; i < end; ++i) sum += log_r_diag[i];
  return sum / (static_cast<double>(end - begin) * dtau);
}

Eigen::VectorXd ftle(const std::vector<Eigen::MatrixXd>& rs, std::size_t begin,
                     std::size_t end, double dtau) {
  if (begin >= end || end > rs.size()) throw input_error("empty or out-of-range FTLE window");
  if (!(dtau > 0.0)) throw input_error("dtau must be positive");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rs[begin].rows());
  for (std::size_t i = begin; i < end; ++i)
    sum += rs[i].diagonal().array().log().matrix();
  return sum / (static_cast<double>(end - begin) * dtau);
}

Eigen::VectorXd ftle(const std::vector<Eigen::MatrixXd>& rs, double dtau) {
  return ftle(rs, 0, rs.size(), dtau);
}

Eigen::VectorXd lyapunov_spectrum(const std::vector<Eigen::MatrixXd>& rs, double dtau) {
  return ftle(rs, 0, rs.size(), dtau);
}

namespace {

// Backward Ginelli step: C <- normalize_columns(R^{-1} C).
void backward_step(const Eigen::MatrixXd& r, Eigen::MatrixXd& c) {
  for (Eigen::Index q = 0; q < r.cols(); ++q)
    if (r(q, q) == 0.0 || !std::isfinite(r(q, q)))
      throw numerical_error("singular triangular factor in backward CLV iteration");
  r.triangularView<Eigen::Upper>().solveInPlace(c);
  for (Eigen::Index col = 0; col < c.cols(); ++col) {
    const double norm = c.col(col).norm();
    if (norm == 0.0 || !std::isfinite(norm))
      throw numerical_error("degenerate CLV coefficient column in backward iteration");
    c.col(col) /= norm;
  }
}

}  // namespace

std::vector<Eigen::MatrixXd> ginelli_clvs(const std::vector<Eigen::MatrixXd>& qs,
                                          const std::vector<Eigen::MatrixXd>& rs,
                                          long discard_tail, std::uint64_t seed) {
  if (qs.empty() || qs.size() != rs.size())
    throw input_error("ginelli_clvs needs aligned, non-empty Q/R sequences");
  if (discard_tail < 1) throw input_error("discard_tail must be >= 1");
  const long n = static_cast<long>(qs.size());
  const long emit = n - discard_tail;
  const Eigen::Index dim = qs[0].rows();

  // Random upper-triangular start with unit diagonal, columns normalized.
  // The unit diagonal keeps every column coupled to its own Gram-Schmidt
  // direction; a zero there would never recover under the backward map.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    for (Eigen::Index row = 0; row < col; ++row) coeff(row, col) = gauss(rng);
    coeff(col, col) = 1.0;
    coeff.col(col) /= coeff.col(col).norm();
  }

  std::vector<Eigen::MatrixXd> out(emit > 0 ? static_cast<std::size_t>(emit) : 0);
  for (long i = n - 1; i >= 0; --i) {
    if (i < emit) out[static_cast<std::size_t>(i)] = qs[static_cast<std::size_t>(i)] * coeff;
    if (i > 0) backward_step(rs[static_cast<std::size_t>(i)], coeff);
  }
  return out;
}

Eigen::MatrixXd estimate_clvs_online(const std::vector<Eigen::MatrixXd>& trailing_qs,
                                     const std::vector<Eigen::MatrixXd>& trailing_rs,
                                     int window_intervals) {
  if (window_intervals < 1) throw input_error("CLV window must be >= 1");
  const auto w = static_cast<std::size_t>(window_intervals);
  if (trailing_qs.size() != w || trailing_rs.size() != w)
    throw input_error("trailing buffers must hold exactly window_intervals entries");
  const Eigen::Index dim = trailing_qs[0].rows();
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t i = w - 1; i >= 1; --i) backward_step(trailing_rs[i], coeff);
  return trailing_qs[0] * coeff;
}

ClvAngles clv_angles(const Eigen::MatrixXd& clvs) {
  if (clvs.rows() < 1 || clvs.cols() < 1) throw input_error("empty CLV set");
  ClvAngles a;
  a.cos_abs = (clvs.transpose() * clvs).cwiseAbs();
  const Eigen::Index dim = clvs.cols();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) sum += a.cos_abs(i, j);
  a.mean_cos_abs = dim > 1 ? sum / (0.5 * static_cast<double>(dim) * static_cast<double>(dim - 1)) : 0.0;
  return a;
}

}  // namespace wdyn
