#include "seg/nn/params.hpp"

#include <cmath>

#include "seg/error.hpp"

namespace seg::nn {

std::size_t ParamStore::add(std::string name, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ShapeError("parameter '" + name + "' has an empty shape");
  if (index_.contains(name)) throw InvalidInputError("duplicate parameter name '" + name + "'");
  const std::size_t idx = params_.size();
  index_.emplace(name, idx);
  params_.push_back({std::move(name), Tensor(rows, cols), Tensor(rows, cols), Tensor(rows, cols)});
  return idx;
}

std::size_t ParamStore::add_uniform(std::string name, std::size_t rows, std::size_t cols,
                                    std::mt19937_64& rng) {
  const std::size_t idx = add(std::move(name), rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : params_[idx].value.data()) w = dist(rng);
  return idx;
}

bool ParamStore::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

std::size_t ParamStore::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InvalidInputError("no parameter named '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

Gradients ParamStore::zero_gradients() const {
  Gradients g;
  g.reserve(params_.size());
  for (const auto& p : params_) g.emplace_back(p.value.rows(), p.value.cols());
  return g;
}

void accumulate(Gradients& dst, const Gradients& src, double scale) {
  if (dst.size() != src.size()) throw ShapeError("gradient sets differ in parameter count");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!dst[i].same_shape(src[i])) {
      throw ShapeError("gradient " + std::to_string(i) + " shape " + src[i].shape_str() +
                       " does not match " + dst[i].shape_str());
    }
    auto& d = dst[i].data();
    const auto& s = src[i].data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += scale * s[k];
  }
}

void adam_step(ParamStore& params, const Gradients& grads, const AdamOptions& opt) {
  if (grads.size() != params.size()) {
    throw ShapeError("adam: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].same_shape(params[i].value)) {
      throw ShapeError("adam: gradient for '" + params[i].name + "' has shape " +
                       grads[i].shape_str() + ", parameter is " + params[i].value.shape_str());
    }
  }
  params.advance_step();
  const double t = static_cast<double>(params.step());
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& w = params[i].value.data();
    auto& m = params[i].first_moment.data();
    auto& v = params[i].second_moment.data();
    const auto& g = grads[i].data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g[k];
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
    }
  }
}

}  // namespace seg::nn
