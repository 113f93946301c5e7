#include "seg/subgraph.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>

#include "seg/error.hpp"

namespace seg {

namespace {

// Appends every node within `hops` of source to `out`.
void collect_ball(const Graph& g, NodeId source, unsigned hops, std::vector<NodeId>& out) {
  std::unordered_map<NodeId, unsigned> depth{{source, 0}};
  std::deque<NodeId> queue{source};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    out.push_back(u);
    const unsigned du = depth[u];
    if (du == hops) continue;
    for (NodeId v : g.neighbors(u)) {
      if (depth.try_emplace(v, du + 1).second) queue.push_back(v);
    }
  }
}

}  // namespace

std::vector<int> bfs_distances(const Graph& g, NodeId source, int max_depth) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::deque<NodeId> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    if (dist[u] == max_depth) continue;
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

EnclosingSubgraph extract_enclosing_subgraph(const Graph& g, NodeId i, NodeId j, unsigned hops,
                                             bool exclude_target_edge) {
  if (i == j) throw InvalidPairError("target pair must be two distinct nodes, got (" +
                                     std::to_string(i) + ", " + std::to_string(j) + ")");
  if (i >= g.num_nodes() || j >= g.num_nodes()) {
    throw BoundsError("target pair (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") out of range [0, " + std::to_string(g.num_nodes()) + ")");
  }
  if (hops == 0) throw InvalidInputError("enclosing subgraph needs hops >= 1");

  std::vector<NodeId> ball;
  collect_ball(g, i, hops, ball);
  collect_ball(g, j, hops, ball);
  std::sort(ball.begin(), ball.end());
  ball.erase(std::unique(ball.begin(), ball.end()), ball.end());
  ball.erase(std::remove_if(ball.begin(), ball.end(), [&](NodeId u) { return u == i || u == j; }),
             ball.end());

  EnclosingSubgraph sub;
  sub.hops = hops;
  sub.local_to_global.reserve(ball.size() + 2);
  sub.local_to_global.push_back(i);
  sub.local_to_global.push_back(j);
  sub.local_to_global.insert(sub.local_to_global.end(), ball.begin(), ball.end());

  auto local_of = [&](NodeId global) -> long {
    if (global == i) return 0;
    if (global == j) return 1;
    auto it = std::lower_bound(ball.begin(), ball.end(), global);
    if (it == ball.end() || *it != global) return -1;
    return 2 + (it - ball.begin());
  };

  const bool drop_target = exclude_target_edge && g.has_edge(i, j);
  sub.target_edge_removed = drop_target;

  std::vector<Edge> local_edges;
  for (std::size_t lu = 0; lu < sub.local_to_global.size(); ++lu) {
    const NodeId gu = sub.local_to_global[lu];
    for (NodeId gv : g.neighbors(gu)) {
      if (gv <= gu) continue;
      const long lv = local_of(gv);
      if (lv < 0) continue;
      if (drop_target && ((gu == i && gv == j) || (gu == j && gv == i))) continue;
      local_edges.emplace_back(static_cast<NodeId>(lu), static_cast<NodeId>(lv));
    }
  }

  const std::size_t n = sub.local_to_global.size();
  if (g.has_features()) {
    const std::size_t dim = g.feature_dim();
    std::vector<double> feats(n * dim);
    for (std::size_t lu = 0; lu < n; ++lu) {
      auto row = g.features(sub.local_to_global[lu]);
      std::copy(row.begin(), row.end(), feats.begin() + static_cast<std::ptrdiff_t>(lu * dim));
    }
    sub.local_graph = Graph::from_edges(n, local_edges, std::move(feats), dim);
  } else {
    sub.local_graph = Graph::from_edges(n, local_edges);
  }
  return sub;
}

}  // namespace seg
