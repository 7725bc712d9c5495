#include "weightdyn/dataset.hpp"

#include <cmath>
#include <random>

#include "weightdyn/errors.hpp"

namespace wdyn {

Dataset generate_dataset(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw input_error("dataset size must be >= 1");
  Dataset d;
  d.seed = seed;
  d.features.resize(2, n);
  d.targets.resize(1, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = gauss(rng);
    const double x2 = gauss(rng);
    d.features(0, i) = x1;
    d.features(1, i) = x2;
    d.targets(0, i) = 10.0 * x1 - 2.0 * x2 * x2;
  }
  return d;
}

Params init_he(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
               std::uint64_t seed, Activation activation) {
  Params p = Params::zeros(n1, n2, n3, activation);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double std21 = std::sqrt(2.0 / static_cast<double>(n1));
  const double std32 = std::sqrt(2.0 / static_cast<double>(n2));
  for (Eigen::Index c = 0; c < p.w21.cols(); ++c)
    for (Eigen::Index r = 0; r < p.w21.rows(); ++r) p.w21(r, c) = std21 * gauss(rng);
  for (Eigen::Index c = 0; c < p.w32.cols(); ++c)
    for (Eigen::Index r = 0; r < p.w32.rows(); ++r) p.w32(r, c) = std32 * gauss(rng);
  return p;
}

Params init_wide(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
                 std::uint64_t seed, double sigma, Activation activation) {
  if (!(sigma > 0.0)) throw input_error("wide-range sigma must be positive");
  Params p = Params::zeros(n1, n2, n3, activation);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (Eigen::Index c = 0; c < p.w21.cols(); ++c)
    for (Eigen::Index r = 0; r < p.w21.rows(); ++r) p.w21(r, c) = gauss(rng);
  for (Eigen::Index c = 0; c < p.w32.cols(); ++c)
    for (Eigen::Index r = 0; r < p.w32.rows(); ++r) p.w32(r, c) = gauss(rng);
  for (Eigen::Index j = 0; j < p.b1.size(); ++j) p.b1[j] = gauss(rng);
  for (Eigen::Index k = 0; k < p.b2.size(); ++k) p.b2[k] = gauss(rng);
  return p;
}

}  // namespace wdyn
