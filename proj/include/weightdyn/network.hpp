#pragma once

#include <Eigen/Dense>

#include "weightdyn/activation.hpp"

namespace wdyn {

// Weights and biases of a three-layer feed-forward net with a linear output
// layer: a1 = sigma(w21 x + b1), a2 = w32 a1 + b2.
struct Params {
  Eigen::MatrixXd w21;  // n2 x n1
  Eigen::MatrixXd w32;  // n3 x n2
  Eigen::VectorXd b1;   // n2
  Eigen::VectorXd b2;   // n3
  Activation activation = Activation::tanh;

  Eigen::Index n1() const { return w21.cols(); }
  Eigen::Index n2() const { return w21.rows(); }
  Eigen::Index n3() const { return w32.rows(); }
  Eigen::Index dim() const { return n1() * n2() + n2() * n3() + n2() + n3(); }

  static Params zeros(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3,
                      Activation act = Activation::tanh);

  // Throws input_error on inconsistent dimensions.
  void validate() const;
};

// One column per sample.
struct Batch {
  Eigen::MatrixXd inputs;   // n1 x n
  Eigen::MatrixXd targets;  // n3 x n
  Eigen::Index size() const { return inputs.cols(); }
};

struct ForwardTrace {
  Eigen::VectorXd pre;  // d = w21 x + b1
  Eigen::VectorXd a1;   // sigma(d)
  Eigen::VectorXd a2;   // w32 a1 + b2
};

// Per-sample forward pass plus elementwise activation derivatives, evaluated
// for a whole batch at once. Buffers are resized on demand so a preallocated
// trace can be reused across steps without touching the heap.
struct BatchTrace {
  Eigen::MatrixXd pre;     // n2 x n
  Eigen::MatrixXd act;     // sigma(pre)
  Eigen::MatrixXd act_d1;  // sigma'(pre)
  Eigen::MatrixXd act_d2;  // sigma''(pre)
  Eigen::MatrixXd out;     // n3 x n
  Eigen::MatrixXd resid;   // out - targets
};

void forward_batch(const Params& p, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, BatchTrace& trace);

ForwardTrace forward(const Params& p, const Eigen::VectorXd& x);

// Batch mean of |y - a2|^2.
double cost(const Params& p, const Batch& batch);
double cost(const Params& p, const BatchTrace& trace);

// Gradient-flow velocity of all weights and biases, i.e. -grad cost, batch
// mean over samples. `velocity` must have the same shape as `p`.
void vector_field(const Params& p, const Eigen::MatrixXd& inputs,
                  const BatchTrace& trace, Params& velocity);
Params vector_field(const Params& p, const Batch& batch);

void validate_batch(const Params& p, const Batch& batch);

}  // namespace wdyn
