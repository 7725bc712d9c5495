#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "weightdyn/network.hpp"

namespace wdyn {

// Regression task y = 10 x1 - 2 x2^2 with standard-normal features.
struct Dataset {
  Eigen::MatrixXd features;  // 2 x n, one column per observation
  Eigen::MatrixXd targets;   // 1 x n
  std::uint64_t seed = 0;

  Eigen::Index size() const { return features.cols(); }
};

Dataset generate_dataset(Eigen::Index n, std::uint64_t seed);

// He initialization: weights N(0, 2/fan_in) per layer, biases zero.
Params init_he(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
               std::uint64_t seed, Activation activation = Activation::tanh);

// Wide-range initialization: every weight and bias N(0, sigma^2).
Params init_wide(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
                 std::uint64_t seed, double sigma = 20.0,
                 Activation activation = Activation::tanh);

}  // namespace wdyn
