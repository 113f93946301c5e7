#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "seg/graph.hpp"

namespace seg {

/// Order-independent key for an undirected pair.
inline std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

using EdgeSet = std::unordered_set<std::uint64_t>;

EdgeSet make_edge_set(std::span<const Edge> edges);

/// A positive pair plus per-source negative candidates (u, w) for MRR.
struct RankQuery {
  Edge positive;
  std::vector<NodeId> negatives;
};

struct SplitDataset {
  std::vector<Edge> train_pos;
  std::vector<Edge> valid_pos;
  std::vector<Edge> test_pos;
  /// Shared negative pools for Hits@K / AUC; empty means sample at evaluation.
  std::vector<Edge> valid_neg;
  std::vector<Edge> test_neg;
  std::vector<RankQuery> valid_rank;
  std::vector<RankQuery> test_rank;

  /// Throws InvalidInputError if splits overlap, a positive appears among the
  /// negatives, or a training positive is not an edge of g.
  void validate(const Graph& g) const;

  /// Every positive of every split.
  EdgeSet all_positives() const;
};

/**
 * Uniform rejection sampling of `count` distinct pairs {u, v}, u != v, that
 * are neither edges of g nor in `forbidden`. Throws SaturationError after
 * one million consecutive rejections.
 */
std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::mt19937_64& rng,
                                   const EdgeSet& forbidden = {});
std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::uint64_t seed,
                                   const EdgeSet& forbidden = {});

inline constexpr std::size_t kMaxConsecutiveRejections = 1'000'000;

/// Directory layout: train.txt valid.txt test.txt [valid_neg.txt test_neg.txt
/// valid_rank.txt test_rank.txt]. Rank files hold "u v w_1 ... w_M" per line.
/// `header` is written as '#' comment lines at the top of every file.
void write_splits(const std::filesystem::path& dir, const SplitDataset& s, const nlohmann::json& header);
SplitDataset read_splits(const std::filesystem::path& dir);

}  // namespace seg
