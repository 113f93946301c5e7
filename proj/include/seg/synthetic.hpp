#pragma once

#include <cstdint>

#include "json.hpp"
#include "seg/dataset.hpp"
#include "seg/graph.hpp"

namespace seg {

struct SynthOptions {
  std::size_t num_nodes = 1000;
  /// Edges attached per arriving node.
  std::size_t edges_per_node = 2;
  /// Chance that an attachment after the first closes a triangle instead of
  /// picking a node by degree.
  double triad_prob = 0.6;
  std::size_t feature_dim = 8;
  double valid_fraction = 0.03;
  double test_fraction = 0.07;
  /// Size of each shared negative pool.
  std::size_t pool_negatives = 1000;
  /// Negatives per positive in the ranking sets.
  std::size_t rank_negatives = 50;
  std::uint64_t seed = 7;
};

void to_json(nlohmann::json& j, const SynthOptions& o);
void from_json(const nlohmann::json& j, SynthOptions& o);

struct SyntheticBenchmark {
  /// Observed graph with held-out positives removed; carries the features.
  Graph graph;
  SplitDataset splits;
};

/**
 * Power-law graph grown by preferential attachment with triad formation.
 * Held-out positives are edges whose endpoints keep at least two common
 * neighbors in the observed graph; every evaluation negative has none.
 * Node features are i.i.d. standard normal and carry no link signal.
 *
 * Throws InvalidInputError for num_nodes < 100.
 */
SyntheticBenchmark generate_synthetic_benchmark(const SynthOptions& opt);

}  // namespace seg
