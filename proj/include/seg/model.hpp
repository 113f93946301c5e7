#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "seg/config.hpp"
#include "seg/graph.hpp"
#include "seg/nn/layers.hpp"
#include "seg/nn/params.hpp"
#include "seg/nn/tape.hpp"
#include "seg/subgraph.hpp"

namespace seg {

/// Recorded forward pass for one target pair.
struct SegForward {
  nn::Var probability;                       // s, 1 x 1
  std::optional<nn::Var> structure_logit;    // absent for SegGnn / FeatureMlp
  std::optional<nn::Var> semantic_logit;     // absent for SegSe / FeatureMlp
  std::optional<nn::Var> embeddings;         // z, one row per local node
};

struct SegOutput {
  double s = 0.0;
  std::optional<double> s_semantic;
  std::optional<double> s_structure;
  nn::Tensor z;
};

/**
 * SEG link predictor.
 *
 * Structural branch: path labels -> one-hot -> one GCN layer -> MLP gives an
 * embedding z_u per subgraph node; the structure head scores
 * MLP(z_i * z_j). Semantic branch: raw features and z are projected to a
 * shared width, summed and passed through an MLP, then a SAGE stack,
 * SortPooling over the concatenated layer outputs and an MLP head. The two
 * head logits are summed before the final sigmoid.
 *
 * The model object holds only the architecture; parameters live in a
 * ParamStore created by init_params().
 */
class SegModel {
 public:
  SegModel(SegConfig cfg, std::size_t feature_dim);

  const SegConfig& config() const { return cfg_; }
  std::size_t feature_dim() const { return feature_dim_; }

  nn::ParamStore init_params(std::uint64_t seed) const;

  /// Throws FormatError if `params` lacks a tensor this architecture needs or
  /// one has the wrong shape.
  void check_params(const nn::ParamStore& params) const;

  LabelAssignment structural_labels(const EnclosingSubgraph& sub) const;

  /// z for every local node (num_local x embed_dim).
  nn::Var structure_encode(nn::Tape& tape, const EnclosingSubgraph& sub) const;

  /// Structure head logit, MLP(z_i * z_j). Throws ShapeError on a width mismatch.
  nn::Var structure_logit(nn::Var z_i, nn::Var z_j) const;

  /// Fused node inputs for the GNN. `x` may be empty (no raw features).
  nn::Var fuse_features(nn::Tape& tape, const nn::Tensor& x, nn::Var z) const;

  /// Semantic head logit from fused inputs on the given local adjacency.
  nn::Var semantic_logit(nn::Tape& tape, const Graph& local, nn::Var x_fused) const;

  SegForward forward(nn::Tape& tape, const EnclosingSubgraph& sub) const;

  EnclosingSubgraph extract(const Graph& g, NodeId i, NodeId j) const;

  /// Extract, encode and score one pair.
  SegOutput predict_link(const Graph& g, NodeId i, NodeId j, const nn::ParamStore& params) const;

  double score(const Graph& g, NodeId i, NodeId j, const nn::ParamStore& params) const {
    return predict_link(g, i, j, params).s;
  }

 private:
  bool uses_semantic_branch() const;
  bool uses_structure_head() const;
  std::size_t gnn_input_dim(std::size_t layer) const;

  SegConfig cfg_;
  std::size_t feature_dim_;
};

/// Mean sigmoid cross-entropy of the combined scores of a batch recorded on
/// one tape.
nn::Var seg_loss(std::span<const SegForward> batch, std::span<const double> labels);

/// Raw feature rows of a subgraph as a tensor (0 columns when absent).
nn::Tensor local_features(const EnclosingSubgraph& sub);

}  // namespace seg
