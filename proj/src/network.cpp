#include "weightdyn/network.hpp"

#include <string>

#include "weightdyn/errors.hpp"

namespace wdyn {

Params Params::zeros(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3, Activation act) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw input_error("layer sizes must be positive");
  Params p;
  p.w21 = Eigen::MatrixXd::Zero(n2, n1);
  p.w32 = Eigen::MatrixXd::Zero(n3, n2);
  p.b1 = Eigen::VectorXd::Zero(n2);
  p.b2 = Eigen::VectorXd::Zero(n3);
  p.activation = act;
  return p;
}

void Params::validate() const {
  if (w21.rows() < 1 || w21.cols() < 1 || w32.rows() < 1)
    throw input_error("empty weight matrix");
  if (w32.cols() != w21.rows())
    throw input_error("w32 columns (" + std::to_string(w32.cols()) +
                      ") do not match hidden size " + std::to_string(w21.rows()));
  if (b1.size() != w21.rows()) throw input_error("b1 size does not match hidden size");
  if (b2.size() != w32.rows()) throw input_error("b2 size does not match output size");
}

void validate_batch(const Params& p, const Batch& batch) {
  if (batch.inputs.cols() < 1) throw input_error("batch must not be empty");
  if (batch.inputs.rows() != p.n1())
    throw input_error("batch input length " + std::to_string(batch.inputs.rows()) +
                      " does not match n1 = " + std::to_string(p.n1()));
  if (batch.targets.rows() != p.n3())
    throw input_error("batch target length does not match n3");
  if (batch.targets.cols() != batch.inputs.cols())
    throw input_error("batch inputs and targets have different sample counts");
}

void forward_batch(const Params& p, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, BatchTrace& t) {
  const Eigen::Index n = inputs.cols();
  t.pre.resize(p.n2(), n);
  t.act.resize(p.n2(), n);
  t.act_d1.resize(p.n2(), n);
  t.act_d2.resize(p.n2(), n);
  t.out.resize(p.n3(), n);
  t.resid.resize(p.n3(), n);

  t.pre.noalias() = p.w21 * inputs;
  t.pre.colwise() += p.b1;
  const double* src = t.pre.data();
  double* v = t.act.data();
  double* d1 = t.act_d1.data();
  double* d2 = t.act_d2.data();
  const Eigen::Index count = t.pre.size();
  for (Eigen::Index i = 0; i < count; ++i) {
    const ActivationValue a = activation_eval(p.activation, src[i]);
    v[i] = a.value;
    d1[i] = a.d1;
    d2[i] = a.d2;
  }
  t.out.noalias() = p.w32 * t.act;
  t.out.colwise() += p.b2;
  t.resid = t.out - targets;
}

ForwardTrace forward(const Params& p, const Eigen::VectorXd& x) {
  p.validate();
  if (x.size() != p.n1())
    throw input_error("input length " + std::to_string(x.size()) +
                      " does not match n1 = " + std::to_string(p.n1()));
  ForwardTrace t;
  t.pre = p.w21 * x + p.b1;
  t.a1.resize(t.pre.size());
  for (Eigen::Index i = 0; i < t.pre.size(); ++i)
    t.a1[i] = activation_eval(p.activation, t.pre[i]).value;
  t.a2 = p.w32 * t.a1 + p.b2;
  return t;
}

double cost(const Params& p, const BatchTrace& t) {
  (void)p;
  return t.resid.squaredNorm() / static_cast<double>(t.resid.cols());
}

double cost(const Params& p, const Batch& batch) {
  p.validate();
  validate_batch(p, batch);
  BatchTrace t;
  forward_batch(p, batch.inputs, batch.targets, t);
  return cost(p, t);
}

void vector_field(const Params& p, const Eigen::MatrixXd& inputs,
                  const BatchTrace& t, Params& velocity) {
  const double scale = -2.0 / static_cast<double>(inputs.cols());
  // Hidden-layer error signal sigma'(d) .* (w32^T grad C), per sample.
  Eigen::MatrixXd hidden = t.act_d1.cwiseProduct(p.w32.transpose() * t.resid);
  velocity.w21.noalias() = scale * (hidden * inputs.transpose());
  velocity.w32.noalias() = scale * (t.resid * t.act.transpose());
  velocity.b1.noalias() = scale * hidden.rowwise().sum();
  velocity.b2.noalias() = scale * t.resid.rowwise().sum();
  velocity.activation = p.activation;
}

Params vector_field(const Params& p, const Batch& batch) {
  p.validate();
  validate_batch(p, batch);
  BatchTrace t;
  forward_batch(p, batch.inputs, batch.targets, t);
  Params velocity = Params::zeros(p.n1(), p.n2(), p.n3(), p.activation);
  vector_field(p, batch.inputs, t, velocity);
  return velocity;
}

}  // namespace wdyn
