#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace seg {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/**
 * Immutable undirected graph in CSR form.
 *
 * Neighbor lists are sorted ascending, symmetric, and free of duplicates and
 * self-loops. Optional node features are stored row-major, one row per node.
 */
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list: edges are symmetrized, deduplicated
  /// and self-loops dropped. Ids must be < num_nodes.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  /// Same as from_edges but attaches a num_nodes x feature_dim matrix.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          std::vector<double> features,
                          std::size_t feature_dim);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  /// Sorted neighbor list of u. Throws BoundsError if u is out of range.
  std::span<const NodeId> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const { return neighbors(u).size(); }
  bool has_edge(NodeId u, NodeId v) const;

  bool has_features() const { return feature_dim_ > 0; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::span<const double> features(NodeId u) const;
  const std::vector<double>& feature_matrix() const { return features_; }

  /// Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edges() const;

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const NodeId> targets() const { return targets_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> features_;
  std::size_t feature_dim_ = 0;
};

/// Returns (sorted neighbor list, degree). Throws BoundsError when u >= num_nodes.
std::pair<std::span<const NodeId>, std::size_t> adjacency_query(const Graph& g, NodeId u);

struct LoadOptions {
  /// Map arbitrary (possibly sparse) integer ids to 0..n-1 in order of first
  /// appearance. The mapping is returned in LoadResult::external_ids.
  bool remap_ids = false;
};

struct LoadResult {
  Graph graph;
  /// external_ids[local] = id in the input file; empty when ids were not remapped.
  std::vector<std::uint64_t> external_ids;
};

/// Parses an edge list ("u v" per line, '#' comments) and an optional feature
/// file ("u f_1 ... f_D" per line). Throws ParseError on malformed lines and
/// FormatError on inconsistent feature widths.
LoadResult load_edge_list(std::istream& edges, std::istream* features = nullptr,
                          const LoadOptions& options = {});

/// Reads only "u v" pairs, no symmetrization or dedup. Used for split files.
std::vector<Edge> read_pairs(std::istream& in);

void write_edge_list(std::ostream& out, const Graph& g);
void write_features(std::ostream& out, const Graph& g);
void write_pairs(std::ostream& out, std::span<const Edge> pairs);

}  // namespace seg
