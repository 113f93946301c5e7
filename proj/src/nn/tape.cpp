#include "seg/nn/tape.hpp"

#include "seg/error.hpp"

namespace seg::nn {

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  Node& n = nodes_.emplace_back();
  n.op = "constant";
  n.value = std::move(value);
  return {this, nodes_.size() - 1};
}

Var Tape::param(std::size_t index) {
  if (params_ == nullptr) throw InvalidInputError("tape has no parameter store");
  if (index >= params_->size()) throw InvalidInputError("parameter index out of range");
  if (param_nodes_.empty()) param_nodes_.assign(params_->size(), -1);
  if (param_nodes_[index] >= 0) return {this, static_cast<std::size_t>(param_nodes_[index])};
  Node& n = nodes_.emplace_back();
  n.op = "param";
  n.borrowed = &(*params_)[index].value;
  n.requires_grad = true;
  n.param_index = static_cast<long>(index);
  param_nodes_[index] = static_cast<long>(nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

Var Tape::param(std::string_view name) {
  if (params_ == nullptr) throw InvalidInputError("tape has no parameter store");
  return param(params_->index_of(name));
}

Var Tape::record(const char* op, Tensor value, std::vector<std::size_t> inputs, Backward backward) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node& n = nodes_.emplace_back();
  n.op = op;
  n.value = std::move(value);
  for (std::size_t in : inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  return {this, nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.borrowed != nullptr ? *n.borrowed : n.value;
}

void Tape::accumulate(std::size_t id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  const Tensor& v = n.borrowed != nullptr ? *n.borrowed : n.value;
  if (!g.same_shape(v)) {
    throw ShapeError(std::string("gradient shape ") + g.shape_str() + " does not match " +
                     v.shape_str() + " at " + n.op);
  }
  if (n.grad.empty()) {
    n.grad = g;
    return;
  }
  auto& d = n.grad.data();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += g[k];
}

void Tape::backward(Var loss) {
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward needs a scalar loss, got " + lv.shape_str());
  }
  for (auto& n : nodes_) n.grad = Tensor();
  accumulate(loss.id, Tensor::scalar(1.0));
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (!n.grad.empty()) return n.grad;
  const Tensor& val = value(v);
  return Tensor(val.rows(), val.cols());
}

Gradients Tape::param_grads() const {
  if (params_ == nullptr) return {};
  Gradients out = params_->zero_gradients();
  for (std::size_t i = 0; i < param_nodes_.size(); ++i) {
    if (param_nodes_[i] < 0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(param_nodes_[i])];
    if (!n.grad.empty()) out[i] = n.grad;
  }
  return out;
}

Gradients grad(Var loss) {
  loss.tape->backward(loss);
  return loss.tape->param_grads();
}

}  // namespace seg::nn
