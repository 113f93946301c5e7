#pragma once

#include <vector>

#include "seg/graph.hpp"

namespace seg {

/**
 * Induced k-hop neighborhood of a target pair, re-indexed locally.
 *
 * Local order: target_a = 0, target_b = 1, then the remaining nodes by
 * ascending global id. Node features, when the source graph has them, are
 * copied into local_graph.
 */
struct EnclosingSubgraph {
  Graph local_graph;
  std::vector<NodeId> local_to_global;
  NodeId target_a = 0;
  NodeId target_b = 1;
  unsigned hops = 1;
  /// True when {i, j} was an edge of the source graph and was left out.
  bool target_edge_removed = false;

  std::size_t size() const { return local_to_global.size(); }
};

/// Throws InvalidPairError when i == j, BoundsError when ids are out of range
/// and InvalidInputError when hops == 0.
EnclosingSubgraph extract_enclosing_subgraph(const Graph& g, NodeId i, NodeId j, unsigned hops,
                                             bool exclude_target_edge = true);

/// Breadth-first distances from `source`, capped at `max_depth`; unreached
/// nodes get -1.
std::vector<int> bfs_distances(const Graph& g, NodeId source, int max_depth);

}  // namespace seg
