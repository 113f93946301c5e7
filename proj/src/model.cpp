#include "seg/model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "seg/error.hpp"
#include "seg/nn/ops.hpp"
#include "seg/structure.hpp"

namespace seg {

using nn::Tape;
using nn::Tensor;
using nn::Var;

namespace {

std::string gnn_name(std::size_t layer, const char* part) {
  return "gnn." + std::to_string(layer) + "." + part;
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Tensor local_features(const EnclosingSubgraph& sub) {
  const Graph& g = sub.local_graph;
  if (!g.has_features()) return Tensor(sub.size(), 0);
  return Tensor(g.num_nodes(), g.feature_dim(), g.feature_matrix());
}

SegModel::SegModel(SegConfig cfg, std::size_t feature_dim)
    : cfg_(std::move(cfg)), feature_dim_(feature_dim) {
  cfg_.validate();
  if (cfg_.variant == Variant::FeatureMlp && feature_dim_ == 0) {
    throw InvalidInputError("the feature-only MLP baseline needs node features");
  }
}

bool SegModel::uses_semantic_branch() const {
  return cfg_.variant == Variant::Seg || cfg_.variant == Variant::SegGnn;
}
bool SegModel::uses_structure_head() const {
  return cfg_.variant == Variant::Seg || cfg_.variant == Variant::SegSe;
}

std::size_t SegModel::gnn_input_dim(std::size_t layer) const {
  return layer == 0 ? cfg_.fusion_dim : cfg_.gnn_hidden;
}

nn::ParamStore SegModel::init_params(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  nn::ParamStore p;
  const std::size_t h = cfg_.predictor_hidden;

  if (cfg_.variant == Variant::FeatureMlp) {
    std::vector<std::size_t> dims{feature_dim_};
    for (std::size_t l = 1; l < cfg_.predictor_layers; ++l) dims.push_back(h);
    dims.push_back(1);
    nn::init_mlp(p, "baseline.mlp", dims, rng);
    return p;
  }

  p.add_uniform("struct.gcn.weight", cfg_.label_width(), cfg_.struct_hidden, rng);
  {
    std::vector<std::size_t> dims{cfg_.struct_hidden};
    for (std::size_t l = 1; l < cfg_.struct_mlp_layers; ++l) dims.push_back(cfg_.struct_hidden);
    dims.push_back(cfg_.embed_dim);
    nn::init_mlp(p, "struct.mlp", dims, rng);
  }
  if (uses_structure_head()) {
    std::vector<std::size_t> dims{cfg_.embed_dim};
    for (std::size_t l = 1; l < cfg_.predictor_layers; ++l) dims.push_back(h);
    dims.push_back(1);
    nn::init_mlp(p, "struct.head", dims, rng);
  }
  if (uses_semantic_branch()) {
    if (feature_dim_ > 0) {
      nn::init_mlp(p, "fuse.proj_x", std::array{feature_dim_, cfg_.fusion_dim}, rng);
    }
    nn::init_mlp(p, "fuse.proj_z", std::array{cfg_.embed_dim, cfg_.fusion_dim}, rng);
    std::vector<std::size_t> dims(cfg_.fusion_mlp_layers + 1, cfg_.fusion_dim);
    nn::init_mlp(p, "fuse.mlp", dims, rng);

    for (std::size_t l = 0; l < cfg_.gnn_layers; ++l) {
      if (cfg_.backbone == Backbone::Sage) {
        p.add_uniform(gnn_name(l, "self"), gnn_input_dim(l), cfg_.gnn_hidden, rng);
        p.add_uniform(gnn_name(l, "neigh"), gnn_input_dim(l), cfg_.gnn_hidden, rng);
      } else {
        p.add_uniform(gnn_name(l, "weight"), gnn_input_dim(l), cfg_.gnn_hidden, rng);
      }
    }
    std::vector<std::size_t> head{cfg_.sortpool_k * cfg_.gnn_layers * cfg_.gnn_hidden};
    for (std::size_t l = 1; l < cfg_.predictor_layers; ++l) head.push_back(h);
    head.push_back(1);
    nn::init_mlp(p, "sem.head", head, rng);
  }
  return p;
}

void SegModel::check_params(const nn::ParamStore& params) const {
  const nn::ParamStore expected = init_params(0);
  for (const auto& e : expected) {
    if (!params.contains(e.name)) throw FormatError("checkpoint lacks parameter '" + e.name + "'");
    const auto& have = params.value(e.name);
    if (!have.same_shape(e.value)) {
      throw FormatError("parameter '" + e.name + "' has shape " + have.shape_str() + ", model expects " +
                        e.value.shape_str());
    }
  }
  if (params.size() != expected.size()) {
    throw FormatError("checkpoint has " + std::to_string(params.size()) + " parameters, model expects " +
                      std::to_string(expected.size()));
  }
}

LabelAssignment SegModel::structural_labels(const EnclosingSubgraph& sub) const {
  if (cfg_.labeling == LabelScheme::Drnl) return drnl_label(sub);
  return path_label(sub, cfg_.lambda, cfg_.path_limit);
}

Var SegModel::structure_encode(Tape& tape, const EnclosingSubgraph& sub) const {
  const LabelAssignment la = structural_labels(sub);
  const int top = static_cast<int>(cfg_.label_width()) - 1;
  Var onehot = tape.constant(one_hot_encode(la, top));
  Var z0 = nn::gcn_layer(nn::gcn_normalized_adjacency(sub.local_graph), onehot,
                         tape.param("struct.gcn.weight"));
  const auto layers = nn::bind_mlp(tape, "struct.mlp", cfg_.struct_mlp_layers);
  return nn::mlp(z0, layers);
}

Var SegModel::structure_logit(Var z_i, Var z_j) const {
  if (z_i.cols() != z_j.cols() || z_i.rows() != 1 || z_j.rows() != 1) {
    throw ShapeError("structure head needs two row vectors of equal width, got " +
                     z_i.value().shape_str() + " and " + z_j.value().shape_str());
  }
  const auto layers = nn::bind_mlp(*z_i.tape, "struct.head", cfg_.predictor_layers);
  return nn::mlp(nn::hadamard(z_i, z_j), layers);
}

Var SegModel::fuse_features(Tape& tape, const Tensor& x, Var z) const {
  const auto proj_z = nn::bind_mlp(tape, "fuse.proj_z", 1);
  Var fused = nn::mlp(z, proj_z);
  if (x.cols() > 0) {
    if (x.rows() != z.rows()) {
      throw ShapeError("fusion: " + std::to_string(x.rows()) + " feature rows vs " +
                       std::to_string(z.rows()) + " embedding rows");
    }
    const auto proj_x = nn::bind_mlp(tape, "fuse.proj_x", 1);
    fused = nn::add(nn::mlp(tape.constant(x), proj_x), fused);
  }
  const auto layers = nn::bind_mlp(tape, "fuse.mlp", cfg_.fusion_mlp_layers);
  return nn::mlp(fused, layers);
}

Var SegModel::semantic_logit(Tape& tape, const Graph& local, Var x_fused) const {
  if (x_fused.rows() != local.num_nodes()) {
    throw ShapeError("semantic branch: " + std::to_string(x_fused.rows()) + " rows for " +
                     std::to_string(local.num_nodes()) + " nodes");
  }
  std::shared_ptr<const nn::SparseMatrix> op =
      cfg_.backbone == Backbone::Sage ? nn::mean_neighbor_operator(local)
                                      : nn::gcn_normalized_adjacency(local);
  std::vector<Var> outputs;
  Var h = x_fused;
  for (std::size_t l = 0; l < cfg_.gnn_layers; ++l) {
    if (cfg_.backbone == Backbone::Sage) {
      h = nn::sage_layer(op, h, tape.param(gnn_name(l, "self")), tape.param(gnn_name(l, "neigh")));
    } else {
      h = nn::gcn_layer(op, h, tape.param(gnn_name(l, "weight")));
    }
    outputs.push_back(h);
  }
  Var pooled = nn::sort_pooling(nn::concat_cols(outputs), cfg_.sortpool_k);
  Var flat = nn::reshape(pooled, 1, pooled.rows() * pooled.cols());
  const auto head = nn::bind_mlp(tape, "sem.head", cfg_.predictor_layers);
  return nn::mlp(flat, head);
}

SegForward SegModel::forward(Tape& tape, const EnclosingSubgraph& sub) const {
  SegForward out;
  if (cfg_.variant == Variant::FeatureMlp) {
    const Tensor x = local_features(sub);
    const std::array<long, 1> ia{static_cast<long>(sub.target_a)};
    const std::array<long, 1> ib{static_cast<long>(sub.target_b)};
    Var xs = tape.constant(x);
    Var pair = nn::hadamard(nn::select_rows(xs, ia), nn::select_rows(xs, ib));
    const auto layers = nn::bind_mlp(tape, "baseline.mlp", cfg_.predictor_layers);
    out.probability = nn::sigmoid(nn::mlp(pair, layers));
    return out;
  }

  Var z = structure_encode(tape, sub);
  out.embeddings = z;
  if (uses_structure_head()) {
    const std::array<long, 1> ia{static_cast<long>(sub.target_a)};
    const std::array<long, 1> ib{static_cast<long>(sub.target_b)};
    out.structure_logit = structure_logit(nn::select_rows(z, ia), nn::select_rows(z, ib));
  }
  if (uses_semantic_branch()) {
    Var fused = fuse_features(tape, local_features(sub), z);
    out.semantic_logit = semantic_logit(tape, sub.local_graph, fused);
  }

  Var logit = out.structure_logit && out.semantic_logit
                  ? nn::add(*out.semantic_logit, *out.structure_logit)
                  : (out.structure_logit ? *out.structure_logit : *out.semantic_logit);
  out.probability = nn::sigmoid(logit);
  return out;
}

EnclosingSubgraph SegModel::extract(const Graph& g, NodeId i, NodeId j) const {
  return extract_enclosing_subgraph(g, i, j, cfg_.hops, cfg_.exclude_target_edge);
}

SegOutput SegModel::predict_link(const Graph& g, NodeId i, NodeId j,
                                 const nn::ParamStore& params) const {
  const EnclosingSubgraph sub = extract(g, i, j);
  Tape tape(&params);
  const SegForward f = forward(tape, sub);
  SegOutput out;
  out.s = f.probability.value()[0];
  if (f.semantic_logit) out.s_semantic = sigmoid(f.semantic_logit->value()[0]);
  if (f.structure_logit) out.s_structure = sigmoid(f.structure_logit->value()[0]);
  if (f.embeddings) out.z = f.embeddings->value();
  return out;
}

nn::Var seg_loss(std::span<const SegForward> batch, std::span<const double> labels) {
  if (batch.empty()) throw InvalidInputError("loss over an empty batch");
  std::vector<Var> scores;
  scores.reserve(batch.size());
  for (const auto& f : batch) scores.push_back(f.probability);
  return nn::bce(nn::concat_rows(scores), labels);
}

}  // namespace seg
