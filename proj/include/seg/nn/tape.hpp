#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "seg/nn/params.hpp"
#include "seg/nn/tensor.hpp"

namespace seg::nn {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/**
 * Records a computation for reverse-mode differentiation.
 *
 * A tape is single-threaded and short-lived: build one per forward pass. It
 * reads parameters from a ParamStore by reference, so the store must outlive
 * the tape and must not be modified while the tape is in use.
 */
class Tape {
 public:
  /// Receives the gradient of the node's output; pushes contributions into
  /// its inputs with Tape::accumulate.
  using Backward = std::function<void(Tape&, const Tensor& grad_out)>;

  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var param(std::size_t index);
  Var param(std::string_view name);

  /// Appends an op node. Throws NumericError naming `op` if the value has a
  /// non-finite entry.
  Var record(const char* op, Tensor value, std::vector<std::size_t> inputs, Backward backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Adds `g` to the gradient of node `id` if that node requires one.
  void accumulate(std::size_t id, const Tensor& g);

  /// Runs the reverse sweep from a 1 x 1 loss. Throws ShapeError otherwise.
  void backward(Var loss);

  /// Gradient of node v after backward(); zero tensor if none flowed.
  Tensor grad(Var v) const;

  /// Per-parameter gradients after backward(), aligned with the ParamStore.
  Gradients param_grads() const;

  const ParamStore* params() const { return params_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    const char* op = "";
    Tensor value;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    std::vector<std::size_t> inputs;
    Backward backward;
    bool requires_grad = false;
    long param_index = -1;
  };

  const ParamStore* params_;
  std::deque<Node> nodes_;
  std::vector<long> param_nodes_;
};

/// Reverse-mode gradient of a scalar loss with respect to every parameter of
/// the tape's store. Parameters are left untouched.
Gradients grad(Var loss);

}  // namespace seg::nn
