#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seg/graph.hpp"
#include "seg/nn/ops.hpp"

namespace seg::nn {

/// D^{-1/2} (A + I) D^{-1/2}, D the degree matrix of A + I.
std::shared_ptr<const SparseMatrix> gcn_normalized_adjacency(const Graph& g);

/// Row-normalized adjacency: (M h)_u = mean over neighbors of h_v; rows of
/// isolated nodes are zero.
std::shared_ptr<const SparseMatrix> mean_neighbor_operator(const Graph& g);

/// relu(A_hat H W).
Var gcn_layer(const Graph& adj, Var h, Var w);
Var gcn_layer(std::shared_ptr<const SparseMatrix> a_hat, Var h, Var w);

/// relu(H W_self + mean_neighbors(H) W_neigh).
Var sage_layer(const Graph& adj, Var h, Var w_self, Var w_neigh);
Var sage_layer(std::shared_ptr<const SparseMatrix> mean_op, Var h, Var w_self, Var w_neigh);

/// Row order produced by SortPooling: descending by the last channel, ties
/// broken by earlier channels (last to first), then by ascending row index.
/// Only the first k entries are returned; -1 marks zero padding.
std::vector<long> sort_pooling_order(const Tensor& h, std::size_t k);

/// k x channels readout of the sorted rows, zero-padded when h has fewer than
/// k rows.
Var sort_pooling(Var h, std::size_t k);

struct Linear {
  Var weight;  // in x out
  Var bias;    // 1 x out
};

enum class Activation { Relu, Tanh };

/// Affine layers with `hidden` activation between them; the last layer is
/// linear.
Var mlp(Var x, std::span<const Linear> layers, Activation hidden = Activation::Relu);

/// Registers "<prefix>.<l>.weight" / "<prefix>.<l>.bias" for consecutive
/// widths dims[l] -> dims[l+1]. Weights are uniform(-1/sqrt(fan_in),
/// 1/sqrt(fan_in)); biases start at zero.
void init_mlp(ParamStore& store, std::string_view prefix, std::span<const std::size_t> dims,
              std::mt19937_64& rng);

/// Binds the parameters registered by init_mlp onto a tape.
std::vector<Linear> bind_mlp(Tape& tape, std::string_view prefix, std::size_t num_layers);

}  // namespace seg::nn
