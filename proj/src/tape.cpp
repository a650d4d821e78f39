#include "dcrm/tape.hpp"

#include "dcrm/errors.hpp"

namespace dcrm {

void Parameter::zero_grad() {
  if (grad.empty() || !(grad.shape() == value.shape()))
    grad = Tensor(value.shape());
  else
    grad.fill(0.0);
}

Tape::Node& Tape::node(Var v) {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw Error("invalid tape variable");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw Error("invalid tape variable");
  return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::input(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = grad_enabled_;
  n.keep_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.param = &p;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backward fn) {
  Node n;
  n.value = std::move(value);
  if (grad_enabled_) {
    for (Var in : inputs) n.requires_grad = n.requires_grad || node(in).requires_grad;
    if (n.requires_grad) n.fn = std::move(fn);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.param ? n.param->value : n.value;
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

Tensor& Tape::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.empty()) n.grad = Tensor(value(v).shape());
  return n.grad;
}

void Tape::accumulate(Var v, const Tensor& g) {
  if (!requires_grad(v)) return;
  grad_buffer(v).add(g);
}

const Tensor* Tape::grad(Var v) const {
  const Node& n = node(v);
  return n.grad.empty() ? nullptr : &n.grad;
}

void Tape::backward(Var out, const Tensor& cotangent) {
  if (consumed_) throw Error("tape already consumed by a backward pass");
  if (!grad_enabled_) throw Error("backward on a tape recorded without gradients");
  consumed_ = true;
  if (!(cotangent.shape() == value(out).shape()))
    throw ShapeError("cotangent " + cotangent.shape().str() + " does not match output " +
                     value(out).shape().str());
  if (!requires_grad(out)) return;
  grad_buffer(out).add(cotangent);
  for (std::int32_t id = out.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty()) continue;
    if (n.fn) {
      n.fn(*this, n.grad);
      n.fn = nullptr;
    }
    if (n.param) {
      if (n.param->grad.empty() || !(n.param->grad.shape() == n.grad.shape()))
        n.param->grad = std::move(n.grad);
      else
        n.param->grad.add(n.grad);
      n.grad = Tensor();
    } else if (!n.keep_grad) {
      n.grad = Tensor();
    }
  }
}

}  // namespace dcrm
