#include "weightdyn/activation.hpp"

#include <cmath>

#include "weightdyn/errors.hpp"

namespace wdyn {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

}  // namespace

ActivationValue activation_eval(Activation kind, double x) {
  switch (kind) {
    case Activation::relu:
      return x > 0.0 ? ActivationValue{x, 1.0, 0.0} : ActivationValue{0.0, 0.0, 0.0};
    case Activation::tanh: {
      const double t = std::tanh(x);
      const double sech2 = 1.0 - t * t;
      return {t, sech2, -2.0 * t * sech2};
    }
    case Activation::gelu: {
      const double cdf = 0.5 * std::erfc(-x * kInvSqrt2);
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return {x * cdf, cdf + x * pdf, 2.0 * pdf - x * x * pdf};
    }
  }
  throw input_error("unknown activation kind");
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::gelu: return "gelu";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "gelu") return Activation::gelu;
  throw input_error("unknown activation '" + std::string(name) + "' (expected relu, tanh or gelu)");
}

}  // namespace wdyn
