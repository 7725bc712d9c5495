#include <random>

#include <doctest.h>

#include "weightdyn/errors.hpp"
#include "weightdyn/jacobian.hpp"
#include "test_helpers.hpp"

using namespace wdyn;

TEST_CASE("b2/b2 block is -2 I for any params") {
  std::mt19937_64 rng(3);
  const Params p = test::random_params(2, 3, 2, Activation::tanh, rng);
  const Batch b = test::random_batch(2, 2, 4, rng);
  const Eigen::MatrixXd j = jacobian_analytic(p, b);
  const StateIndexMap m(p);
  for (Eigen::Index k = 0; k < m.n3; ++k)
    for (Eigen::Index n = 0; n < m.n3; ++n)
      CHECK(j(m.b2(k), m.b2(n)) == (k == n ? -2.0 : 0.0));
}

TEST_CASE("perfect-fit w21/w21 block drops the curvature term") {
  Params p = Params::zeros(2, 2, 1);
  p.w21 << 0.3, -0.2, 0.5, 0.4;
  p.w32 << 1.2, -0.8;
  p.b1 << 0.1, -0.3;
  Batch b = [] {
    Batch batch;
    batch.inputs.resize(2, 3);
    batch.inputs << 0.4, -0.9, 0.2, 1.1, 0.3, -0.5;
    batch.targets.resize(1, 3);
    return batch;
  }();
  for (int c = 0; c < 3; ++c) b.targets(0, c) = forward(p, b.inputs.col(c)).a2[0];

  const Eigen::MatrixXd j = jacobian_analytic(p, b);
  const StateIndexMap m(p);
  const Eigen::MatrixXd gram = p.w32.transpose() * p.w32;
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index jj = 0; jj < 2; ++jj)
      for (Eigen::Index q = 0; q < 2; ++q)
        for (Eigen::Index l = 0; l < 2; ++l) {
          double expected = 0.0;
          for (int c = 0; c < 3; ++c) {
            const auto t = forward(p, b.inputs.col(c));
            const double spj = activation_eval(p.activation, t.pre[jj]).d1;
            const double spl = activation_eval(p.activation, t.pre[l]).d1;
            expected += -2.0 * b.inputs(i, c) * b.inputs(q, c) * spj * spl * gram(jj, l);
          }
          expected /= 3.0;
          CHECK(j(m.w21(jj, i), m.w21(l, q)) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("analytic matches finite differences for smooth activations") {
  std::mt19937_64 rng(41);
  for (Activation act : {Activation::tanh, Activation::gelu}) {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Params p = test::random_params(2, 2, 1, act, rng);
      const Batch b = test::random_batch(2, 1, 8, rng);
      const auto rep = check_jacobian(p, b, 1e-6);
      worst = std::max(worst, rep.max_abs_error);
      CHECK(rep.max_symmetry_defect < 1e-12);
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("relu agreement away from the kinks") {
  std::mt19937_64 rng(99);
  int done = 0;
  while (done < 20) {
    const Params p = test::random_params(2, 2, 1, Activation::relu, rng);
    const Batch b = test::random_batch(2, 1, 4, rng);
    if (!test::away_from_kinks(p, b, 1e-3)) continue;  // regenerate near-kink states
    ++done;
    const auto rep = check_jacobian(p, b, 1e-6);
    CHECK(rep.max_abs_error < 1e-5);
    CHECK(rep.max_symmetry_defect < 1e-12);
  }
}

TEST_CASE("near-linear regime agrees to 1e-8") {
  // Tiny pre-activations keep tanh within ~1e-12 of the identity, where the
  // dynamics is exactly quadratic and central differences are exact up to
  // roundoff amplified by the step.
  std::mt19937_64 rng(7);
  Params p = test::random_params(2, 2, 1, Activation::tanh, rng, 1e-4);
  Batch b = test::random_batch(2, 1, 4, rng);
  b.inputs *= 1e-4;
  const auto rep = check_jacobian(p, b, 1e-6);
  CHECK(rep.max_abs_error < 1e-8);
}

TEST_CASE("fd of the b2/b2 block is -2 I within 1e-9") {
  std::mt19937_64 rng(15);
  const Params p = test::random_params(2, 2, 1, Activation::tanh, rng);
  const Batch b = test::random_batch(2, 1, 4, rng);
  const Eigen::MatrixXd j = jacobian_fd(p, b, 1e-6);
  const StateIndexMap m(p);
  CHECK(std::abs(j(m.b2(0), m.b2(0)) + 2.0) < 1e-9);
}

TEST_CASE("perfect-fit state agrees to 1e-7") {
  Params p = Params::zeros(2, 2, 1);
  p.w21 << 0.3, -0.2, 0.5, 0.4;
  p.w32 << 1.2, -0.8;
  Batch b;
  b.inputs.resize(2, 4);
  b.inputs << 0.4, -0.9, 0.2, 0.6, 1.1, 0.3, -0.5, -0.2;
  b.targets.resize(1, 4);
  for (int c = 0; c < 4; ++c) b.targets(0, c) = forward(p, b.inputs.col(c)).a2[0];
  const auto rep = check_jacobian(p, b, 1e-6);
  CHECK(rep.max_abs_error < 1e-7);
}

TEST_CASE("jacobian of a batch is the mean of single-sample jacobians") {
  std::mt19937_64 rng(23);
  const Params p = test::random_params(2, 2, 1, Activation::gelu, rng);
  const Batch b = test::random_batch(2, 1, 5, rng);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(p.dim(), p.dim());
  for (Eigen::Index c = 0; c < b.size(); ++c) {
    Batch one;
    one.inputs = b.inputs.col(c);
    one.targets = b.targets.col(c);
    mean += jacobian_analytic(p, one);
  }
  mean /= static_cast<double>(b.size());
  CHECK((jacobian_analytic(p, b) - mean).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("fd oracle rejects a non-positive step") {
  std::mt19937_64 rng(1);
  const Params p = test::random_params(2, 2, 1, Activation::tanh, rng);
  const Batch b = test::random_batch(2, 1, 2, rng);
  CHECK_THROWS_AS((void)jacobian_fd(p, b, 0.0), input_error);
}
