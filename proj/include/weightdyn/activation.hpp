#pragma once

#include <string_view>

namespace wdyn {

enum class Activation { relu, tanh, gelu };

struct ActivationValue {
  double value;
  double d1;
  double d2;
};

// Value, first and second derivative of the activation at x.
//
// ReLU uses the subgradient convention sigma'(0) = 0 and sigma'' = 0
// everywhere (the distributional spike at the kink is dropped). GELU is the
// exact erf form x * Phi(x); the tanh approximation would not have an exact
// second derivative.
ActivationValue activation_eval(Activation kind, double x);

std::string_view to_string(Activation kind);
Activation activation_from_string(std::string_view name);

}  // namespace wdyn
