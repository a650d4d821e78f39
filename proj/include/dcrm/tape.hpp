#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "dcrm/tensor.hpp"

namespace dcrm {

/// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // empty until the first backward pass touches it

  void zero_grad();
};

/// Handle to a value recorded on a Tape.
struct Var {
  std::int32_t id = -1;
  bool valid() const noexcept { return id >= 0; }
};

/// Reverse-mode recording of a forward computation. Each recorded node keeps
/// its value and a closure that maps the node's gradient onto its inputs.
/// A tape supports exactly one backward pass.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor& grad_out)>;

  /// With grad disabled nothing needed for backward is kept.
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const noexcept { return grad_enabled_; }

  /// Leaf without gradient.
  Var constant(Tensor value);
  /// Leaf whose gradient can be read back with grad() after backward.
  Var input(Tensor value);
  /// Leaf bound to a parameter; backward adds into parameter.grad.
  Var parameter(Parameter& p);
  /// Result of an op. `fn` runs during backward when this node has a
  /// gradient; it should call accumulate() for each input that requires grad.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward fn);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  /// Gradient buffer of `v`, zero-initialized on first use.
  Tensor& grad_buffer(Var v);
  void accumulate(Var v, const Tensor& g);
  /// Gradient of an input leaf after backward; nullptr if never reached.
  const Tensor* grad(Var v) const;

  /// Propagates `cotangent` (shape of value(out)) back through the tape.
  void backward(Var out, const Tensor& cotangent);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward fn;
    Parameter* param = nullptr;  // parameter leaves read param->value directly
    bool requires_grad = false;
    bool keep_grad = false;
  };

  Node& node(Var v);
  const Node& node(Var v) const;

  bool grad_enabled_;
  bool consumed_ = false;
  std::vector<Node> nodes_;
};

}  // namespace dcrm
