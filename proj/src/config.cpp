#include "seg/config.hpp"

#include <string>

#include "seg/error.hpp"

namespace seg {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Seg: return "seg";
    case Variant::SegSe: return "seg-se";
    case Variant::SegGnn: return "seg-gnn";
    case Variant::FeatureMlp: return "mlp";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "seg") return Variant::Seg;
  if (s == "seg-se") return Variant::SegSe;
  if (s == "seg-gnn") return Variant::SegGnn;
  if (s == "mlp") return Variant::FeatureMlp;
  throw InvalidInputError("unknown variant '" + std::string(s) + "' (expected seg|seg-se|seg-gnn|mlp)");
}

std::string_view to_string(Backbone b) { return b == Backbone::Sage ? "sage" : "gcn"; }

Backbone parse_backbone(std::string_view s) {
  if (s == "sage") return Backbone::Sage;
  if (s == "gcn") return Backbone::Gcn;
  throw InvalidInputError("unknown backbone '" + std::string(s) + "' (expected sage|gcn)");
}

std::size_t SegConfig::label_width() const {
  return static_cast<std::size_t>(labeling == LabelScheme::PathLabeling ? lambda : drnl_max_label) + 1;
}

void SegConfig::validate() const {
  if (lambda < 2) throw InvalidInputError("lambda must be >= 2");
  if (hops < 1) throw InvalidInputError("hops must be >= 1");
  if (drnl_max_label < 1) throw InvalidInputError("drnl_max_label must be >= 1");
  for (std::size_t w : {struct_hidden, struct_mlp_layers, embed_dim, fusion_dim, fusion_mlp_layers,
                        gnn_layers, gnn_hidden, sortpool_k, predictor_hidden, predictor_layers}) {
    if (w == 0) throw InvalidInputError("model widths, depths and sortpool_k must be >= 1");
  }
}

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw InvalidInputError("lr must be >= 0");
  if (batch_size == 0) throw InvalidInputError("batch_size must be >= 1");
  if (!(pos_fraction > 0.0 && pos_fraction <= 1.0)) throw InvalidInputError("pos_fraction must lie in (0, 1]");
  if (!(neg_ratio > 0.0)) throw InvalidInputError("neg_ratio must be > 0");
  for (std::size_t k : hits_k) {
    if (k == 0) throw InvalidInputError("hits@K needs K >= 1");
  }
}

void to_json(nlohmann::json& j, const SegConfig& c) {
  j = nlohmann::json{
      {"lambda", c.lambda},
      {"hops", c.hops},
      {"labeling", to_string(c.labeling)},
      {"drnl_max_label", c.drnl_max_label},
      {"path_limit", c.path_limit},
      {"exclude_target_edge", c.exclude_target_edge},
      {"struct_hidden", c.struct_hidden},
      {"struct_mlp_layers", c.struct_mlp_layers},
      {"embed_dim", c.embed_dim},
      {"fusion_dim", c.fusion_dim},
      {"fusion_mlp_layers", c.fusion_mlp_layers},
      {"backbone", to_string(c.backbone)},
      {"gnn_layers", c.gnn_layers},
      {"gnn_hidden", c.gnn_hidden},
      {"sortpool_k", c.sortpool_k},
      {"predictor_hidden", c.predictor_hidden},
      {"predictor_layers", c.predictor_layers},
      {"variant", to_string(c.variant)},
  };
}

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

void from_json(const nlohmann::json& j, SegConfig& c) {
  read(j, "lambda", c.lambda);
  read(j, "hops", c.hops);
  if (j.contains("labeling")) c.labeling = parse_label_scheme(j.at("labeling").get<std::string>());
  read(j, "drnl_max_label", c.drnl_max_label);
  read(j, "path_limit", c.path_limit);
  read(j, "exclude_target_edge", c.exclude_target_edge);
  read(j, "struct_hidden", c.struct_hidden);
  read(j, "struct_mlp_layers", c.struct_mlp_layers);
  read(j, "embed_dim", c.embed_dim);
  read(j, "fusion_dim", c.fusion_dim);
  read(j, "fusion_mlp_layers", c.fusion_mlp_layers);
  if (j.contains("backbone")) c.backbone = parse_backbone(j.at("backbone").get<std::string>());
  read(j, "gnn_layers", c.gnn_layers);
  read(j, "gnn_hidden", c.gnn_hidden);
  read(j, "sortpool_k", c.sortpool_k);
  read(j, "predictor_hidden", c.predictor_hidden);
  read(j, "predictor_layers", c.predictor_layers);
  if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{
      {"lr", c.lr},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"eps", c.eps},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"pos_fraction", c.pos_fraction},
      {"neg_ratio", c.neg_ratio},
      {"train_on_valid", c.train_on_valid},
      {"seed", c.seed},
      {"threads", c.threads},
      {"hits_k", c.hits_k},
  };
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  read(j, "lr", c.lr);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "eps", c.eps);
  read(j, "batch_size", c.batch_size);
  read(j, "epochs", c.epochs);
  read(j, "pos_fraction", c.pos_fraction);
  read(j, "neg_ratio", c.neg_ratio);
  read(j, "train_on_valid", c.train_on_valid);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  read(j, "hits_k", c.hits_k);
}

}  // namespace seg
