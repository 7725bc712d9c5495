#include <cmath>

#include <doctest.h>

#include "weightdyn/activation.hpp"
#include "weightdyn/errors.hpp"

using wdyn::Activation;
using wdyn::activation_eval;

namespace {

// Independent oracle: central finite differences of the plain value function.
double fd1(Activation kind, double x, double h = 1e-5) {
  return (activation_eval(kind, x + h).value - activation_eval(kind, x - h).value) / (2 * h);
}

double fd2(Activation kind, double x, double h = 1e-4) {
  return (activation_eval(kind, x + h).value - 2 * activation_eval(kind, x).value +
          activation_eval(kind, x - h).value) /
         (h * h);
}

}  // namespace

TEST_CASE("tanh triple at the origin") {
  const auto a = activation_eval(Activation::tanh, 0.0);
  CHECK(a.value == 0.0);
  CHECK(a.d1 == 1.0);
  CHECK(a.d2 == 0.0);
}

TEST_CASE("tanh closed form") {
  for (double x : {-2.0, -0.3, 0.7, 1.9}) {
    const auto a = activation_eval(Activation::tanh, x);
    const double t = std::tanh(x);
    CHECK(a.value == doctest::Approx(t).epsilon(1e-15));
    CHECK(a.d1 == doctest::Approx(1 - t * t).epsilon(1e-15));
    CHECK(a.d2 == doctest::Approx(-2 * t * (1 - t * t)).epsilon(1e-15));
  }
}

TEST_CASE("relu convention") {
  const auto neg = activation_eval(Activation::relu, -1.0);
  CHECK(neg.value == 0.0);
  CHECK(neg.d1 == 0.0);
  CHECK(neg.d2 == 0.0);
  const auto zero = activation_eval(Activation::relu, 0.0);
  CHECK(zero.d1 == 0.0);
  const auto pos = activation_eval(Activation::relu, 2.5);
  CHECK(pos.value == 2.5);
  CHECK(pos.d1 == 1.0);
  CHECK(pos.d2 == 0.0);
}

TEST_CASE("gelu at the origin") {
  const auto a = activation_eval(Activation::gelu, 0.0);
  CHECK(a.value == 0.0);
  CHECK(a.d1 == 0.5);
  // sigma''(0) = 2 phi(0) = sqrt(2/pi), frozen from the finite-difference oracle.
  CHECK(a.d2 == doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(a.d2 == doctest::Approx(fd2(Activation::gelu, 0.0)).epsilon(1e-6));
}

TEST_CASE("smooth activations match finite differences") {
  for (Activation kind : {Activation::tanh, Activation::gelu}) {
    for (double x : {-3.0, -1.1, -0.2, 0.4, 1.3, 2.8}) {
      const auto a = activation_eval(kind, x);
      CHECK(a.d1 == doctest::Approx(fd1(kind, x)).epsilon(1e-8));
      CHECK(a.d2 == doctest::Approx(fd2(kind, x)).epsilon(1e-5));
      CHECK(std::isfinite(a.value));
      CHECK(std::isfinite(a.d1));
      CHECK(std::isfinite(a.d2));
    }
  }
}

TEST_CASE("relu matches identity in the positive region") {
  for (double x : {0.5, 1.0, 7.3}) {
    const auto a = activation_eval(Activation::relu, x);
    CHECK(a.value == x);
    CHECK(a.d1 == 1.0);
  }
}

TEST_CASE("names round-trip") {
  for (Activation kind : {Activation::relu, Activation::tanh, Activation::gelu})
    CHECK(wdyn::activation_from_string(wdyn::to_string(kind)) == kind);
  CHECK_THROWS_AS((void)wdyn::activation_from_string("sigmoid"), wdyn::input_error);
}
