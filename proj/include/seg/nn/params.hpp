#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seg/nn/tensor.hpp"

namespace seg::nn {

struct Parameter {
  std::string name;
  Tensor value;
  // Adam moments, same shape as value.
  Tensor first_moment;
  Tensor second_moment;
};

/// One gradient tensor per parameter, index-aligned with ParamStore.
using Gradients = std::vector<Tensor>;

/**
 * Named, ordered collection of trainable tensors plus optimizer state.
 *
 * Parameter order is the insertion order and is part of the checkpoint
 * format.
 */
class ParamStore {
 public:
  /// Adds a zero-initialized parameter. Throws InvalidInputError on a
  /// duplicate name.
  std::size_t add(std::string name, std::size_t rows, std::size_t cols);

  /// Adds a rows x cols weight drawn from U(-1/sqrt(rows), 1/sqrt(rows)).
  std::size_t add_uniform(std::string name, std::size_t rows, std::size_t cols, std::mt19937_64& rng);

  std::size_t size() const { return params_.size(); }
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  Tensor& value(std::string_view name) { return params_[index_of(name)].value; }
  const Tensor& value(std::string_view name) const { return params_[index_of(name)].value; }

  std::uint64_t step() const { return step_; }
  void advance_step() { ++step_; }
  void set_step(std::uint64_t s) { step_ = s; }

  std::size_t num_scalars() const;
  Gradients zero_gradients() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t step_ = 0;
};

/// dst += scale * src, elementwise per parameter.
void accumulate(Gradients& dst, const Gradients& src, double scale = 1.0);

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update in place. Throws ShapeError if a gradient does
/// not match its parameter.
void adam_step(ParamStore& params, const Gradients& grads, const AdamOptions& opt);

}  // namespace seg::nn
