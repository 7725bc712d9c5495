#pragma once

#include <Eigen/Dense>

#include "weightdyn/network.hpp"
#include "weightdyn/state_map.hpp"

namespace wdyn {

// D x D Jacobian of the training-dynamics vector field with respect to the
// flat state (row = velocity component, column = state component), batch mean
// over samples. The flow is a gradient flow, so the result is -Hessian(cost)
// and symmetric up to rounding.
Eigen::MatrixXd jacobian_analytic(const Params& p, const Batch& batch);

// Accumulating variant for the training loop: `jac` is overwritten, `trace`
// must hold forward_batch(p, inputs, targets) for the same batch.
void jacobian_analytic(const Params& p, const Eigen::MatrixXd& inputs,
                       const BatchTrace& trace, Eigen::MatrixXd& jac);

// Central finite difference of the vector field along each state coordinate,
// step h scaled per coordinate as h * max(1, |theta_m|).
Eigen::MatrixXd jacobian_fd(const Params& p, const Batch& batch, double h = 1e-6);

struct JacobianCheck {
  double max_abs_error = 0.0;       // max |analytic - fd|
  double max_symmetry_defect = 0.0; // max |J - J^T| of the analytic matrix
};

JacobianCheck check_jacobian(const Params& p, const Batch& batch, double h = 1e-6);

}  // namespace wdyn
