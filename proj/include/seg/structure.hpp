#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "seg/graph.hpp"
#include "seg/nn/tensor.hpp"
#include "seg/subgraph.hpp"

namespace seg {

/// Simple paths between the two targets of an enclosing subgraph, in local
/// indices. Every path starts at target_a, ends at target_b and has between
/// 1 and max_len edges.
struct PathSet {
  std::vector<std::vector<NodeId>> paths;
  unsigned max_len = 0;

  std::size_t size() const { return paths.size(); }
};

inline constexpr std::size_t kDefaultPathLimit = 10'000;

/// Depth-first enumeration with distance-based pruning. Paths come out in
/// DFS order over ascending neighbor ids. Throws PathLimitError once more
/// than `path_limit` paths are found (0 disables the cap).
PathSet enumerate_simple_paths(const EnclosingSubgraph& sub, unsigned max_len,
                               std::size_t path_limit = kDefaultPathLimit);

enum class LabelScheme { PathLabeling, Drnl };

std::string_view to_string(LabelScheme s);
LabelScheme parse_label_scheme(std::string_view s);

struct LabelAssignment {
  std::vector<int> labels;
  LabelScheme scheme = LabelScheme::PathLabeling;
  /// Largest label value the scheme can emit (lambda for PL).
  int max_label = 0;
};

/// Path labeling: targets get 0, a node on some path gets the edge length of
/// the shortest path through it minus one, and every other node gets lambda.
LabelAssignment path_label(const EnclosingSubgraph& sub, const PathSet& paths, int lambda);

/// Enumerates paths capped at lambda and labels them.
LabelAssignment path_label(const EnclosingSubgraph& sub, int lambda,
                           std::size_t path_limit = kDefaultPathLimit);

/// Double-radius labeling. Distances to each target are taken with the other
/// target removed; targets get 1 and nodes unreachable from either target 0.
LabelAssignment drnl_label(const EnclosingSubgraph& sub);

/// DRNL value for a distance pair; both distances must be >= 0.
int drnl_value(int dist_a, int dist_b);

/// One row per node with a single 1 at column min(label, width - 1).
nn::Tensor one_hot_encode(const LabelAssignment& la, int lambda);

enum class Heuristic { CommonNeighbors, Jaccard, AdamicAdar, Katz };

std::string_view to_string(Heuristic h);
Heuristic parse_heuristic(std::string_view s);

struct KatzParams {
  double alpha = 0.05;
  unsigned max_len = 4;
};

/// Topology-only similarity of (i, j). Katz counts walks of length
/// 1..max_len weighted by alpha^l. Throws InvalidPairError when i == j.
double heuristic_score(const Graph& g, NodeId i, NodeId j, Heuristic kind,
                       const KatzParams& katz = {});

}  // namespace seg
