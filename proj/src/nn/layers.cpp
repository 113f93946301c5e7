#include "seg/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seg/error.hpp"

namespace seg::nn {

std::shared_ptr<const SparseMatrix> gcn_normalized_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  auto s = std::make_shared<SparseMatrix>();
  s->rows = s->cols = n;
  s->offsets.assign(n + 1, 0);
  std::vector<double> inv_sqrt(n);
  for (NodeId u = 0; u < n; ++u) inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u) + 1));
  for (NodeId u = 0; u < n; ++u) {
    // Neighbors with the self-loop merged in ascending order.
    bool self_done = false;
    for (NodeId v : g.neighbors(u)) {
      if (!self_done && v > u) {
        s->indices.push_back(u);
        s->weights.push_back(inv_sqrt[u] * inv_sqrt[u]);
        self_done = true;
      }
      s->indices.push_back(v);
      s->weights.push_back(inv_sqrt[u] * inv_sqrt[v]);
    }
    if (!self_done) {
      s->indices.push_back(u);
      s->weights.push_back(inv_sqrt[u] * inv_sqrt[u]);
    }
    s->offsets[u + 1] = s->indices.size();
  }
  return s;
}

std::shared_ptr<const SparseMatrix> mean_neighbor_operator(const Graph& g) {
  const std::size_t n = g.num_nodes();
  auto s = std::make_shared<SparseMatrix>();
  s->rows = s->cols = n;
  s->offsets.assign(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    const double w = nb.empty() ? 0.0 : 1.0 / static_cast<double>(nb.size());
    for (NodeId v : nb) {
      s->indices.push_back(v);
      s->weights.push_back(w);
    }
    s->offsets[u + 1] = s->indices.size();
  }
  return s;
}

Var gcn_layer(std::shared_ptr<const SparseMatrix> a_hat, Var h, Var w) {
  if (a_hat->cols != h.rows()) {
    throw ShapeError("gcn_layer: adjacency over " + std::to_string(a_hat->cols) +
                     " nodes, features have " + std::to_string(h.rows()) + " rows");
  }
  return relu(spmm(std::move(a_hat), matmul(h, w)));
}

Var gcn_layer(const Graph& adj, Var h, Var w) {
  return gcn_layer(gcn_normalized_adjacency(adj), h, w);
}

Var sage_layer(std::shared_ptr<const SparseMatrix> mean_op, Var h, Var w_self, Var w_neigh) {
  if (mean_op->cols != h.rows()) {
    throw ShapeError("sage_layer: adjacency over " + std::to_string(mean_op->cols) +
                     " nodes, features have " + std::to_string(h.rows()) + " rows");
  }
  return relu(add(matmul(h, w_self), matmul(spmm(std::move(mean_op), h), w_neigh)));
}

Var sage_layer(const Graph& adj, Var h, Var w_self, Var w_neigh) {
  return sage_layer(mean_neighbor_operator(adj), h, w_self, w_neigh);
}

std::vector<long> sort_pooling_order(const Tensor& h, std::size_t k) {
  std::vector<long> order(h.rows());
  std::iota(order.begin(), order.end(), 0L);
  const std::size_t c = h.cols();
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    for (std::size_t ch = c; ch-- > 0;) {
      const double va = h(static_cast<std::size_t>(a), ch);
      const double vb = h(static_cast<std::size_t>(b), ch);
      if (va != vb) return va > vb;
    }
    return a < b;
  });
  order.resize(k, -1);
  return order;
}

Var sort_pooling(Var h, std::size_t k) {
  if (k == 0) throw InvalidInputError("sort_pooling needs k >= 1");
  const auto order = sort_pooling_order(h.value(), k);
  return select_rows(h, order);
}

Var mlp(Var x, std::span<const Linear> layers, Activation hidden) {
  if (layers.empty()) throw InvalidInputError("mlp needs at least one layer");
  Var h = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (h.cols() != layers[l].weight.rows()) {
      throw ShapeError("mlp layer " + std::to_string(l) + ": input width " +
                       std::to_string(h.cols()) + ", weight " + layers[l].weight.value().shape_str());
    }
    h = add_bias(matmul(h, layers[l].weight), layers[l].bias);
    if (l + 1 < layers.size()) h = hidden == Activation::Relu ? relu(h) : nn::tanh(h);
  }
  return h;
}

void init_mlp(ParamStore& store, std::string_view prefix, std::span<const std::size_t> dims,
              std::mt19937_64& rng) {
  if (dims.size() < 2) throw InvalidInputError("mlp needs at least input and output widths");
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::string base = std::string(prefix) + "." + std::to_string(l);
    store.add_uniform(base + ".weight", dims[l], dims[l + 1], rng);
    store.add(base + ".bias", 1, dims[l + 1]);
  }
}

std::vector<Linear> bind_mlp(Tape& tape, std::string_view prefix, std::size_t num_layers) {
  std::vector<Linear> layers;
  layers.reserve(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string base = std::string(prefix) + "." + std::to_string(l);
    layers.push_back({tape.param(base + ".weight"), tape.param(base + ".bias")});
  }
  return layers;
}

}  // namespace seg::nn
