#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "seg/structure.hpp"

namespace seg {

/// Which scoring heads are active.
enum class Variant {
  Seg,         // structure head + semantic head, logits summed
  SegSe,       // structure head only
  SegGnn,      // semantic head only; structure encoder still feeds the fusion
  FeatureMlp,  // MLP on the Hadamard product of the raw target features
};

enum class Backbone { Sage, Gcn };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);
std::string_view to_string(Backbone b);
Backbone parse_backbone(std::string_view s);

struct SegConfig {
  int lambda = 4;
  unsigned hops = 1;
  LabelScheme labeling = LabelScheme::PathLabeling;
  /// DRNL labels above this value share the last one-hot column.
  int drnl_max_label = 20;
  std::size_t path_limit = kDefaultPathLimit;
  bool exclude_target_edge = true;

  std::size_t struct_hidden = 32;
  std::size_t struct_mlp_layers = 3;
  std::size_t embed_dim = 32;

  std::size_t fusion_dim = 32;
  std::size_t fusion_mlp_layers = 2;

  Backbone backbone = Backbone::Sage;
  std::size_t gnn_layers = 3;
  std::size_t gnn_hidden = 32;
  std::size_t sortpool_k = 10;

  std::size_t predictor_hidden = 128;
  std::size_t predictor_layers = 2;

  Variant variant = Variant::Seg;

  /// Width of the structural one-hot input.
  std::size_t label_width() const;
  /// Throws InvalidInputError if a width is zero or lambda < 2.
  void validate() const;
};

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  /// Share of the training positives drawn each epoch.
  double pos_fraction = 1.0;
  /// Negatives per positive.
  double neg_ratio = 1.0;
  bool train_on_valid = false;
  std::uint64_t seed = 1;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;
  std::vector<std::size_t> hits_k{10, 50, 100};

  void validate() const;
};

void to_json(nlohmann::json& j, const SegConfig& c);
void from_json(const nlohmann::json& j, SegConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace seg
