#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Everything here is written for clarity over speed and shares no
// code with the library beyond the basic Graph type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "seg/graph.hpp"
#include "seg/nn/params.hpp"

namespace seg::oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense adjacency_matrix(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Dense a(n, std::vector<double>(n, 0.0));
  for (auto [u, v] : g.edges()) a[u][v] = a[v][u] = 1.0;
  return a;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), m = b.front().size(), k = b.size();
  Dense c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
  return c;
}

// sum_l alpha^l (A^l)_ij for l = 1..max_len, by explicit matrix powers.
inline double katz(const Graph& g, NodeId i, NodeId j, double alpha, unsigned max_len) {
  const Dense a = adjacency_matrix(g);
  Dense power = a;
  double total = 0.0, w = alpha;
  for (unsigned l = 1; l <= max_len; ++l) {
    total += w * power[i][j];
    power = matmul(power, a);
    w *= alpha;
  }
  return total;
}

inline std::vector<NodeId> common(const Graph& g, NodeId i, NodeId j) {
  const Dense a = adjacency_matrix(g);
  std::vector<NodeId> out;
  for (NodeId w = 0; w < g.num_nodes(); ++w)
    if (a[i][w] != 0.0 && a[j][w] != 0.0) out.push_back(w);
  return out;
}

inline double common_neighbors(const Graph& g, NodeId i, NodeId j) {
  return static_cast<double>(common(g, i, j).size());
}

inline double jaccard(const Graph& g, NodeId i, NodeId j) {
  std::set<NodeId> uni;
  for (NodeId w : g.neighbors(i)) uni.insert(w);
  for (NodeId w : g.neighbors(j)) uni.insert(w);
  if (uni.empty()) return 0.0;
  return common_neighbors(g, i, j) / static_cast<double>(uni.size());
}

inline double adamic_adar(const Graph& g, NodeId i, NodeId j) {
  double s = 0.0;
  for (NodeId w : common(g, i, j)) {
    if (g.degree(w) > 1) s += 1.0 / std::log(static_cast<double>(g.degree(w)));
  }
  return s;
}

// Every vertex sequence s -> t of 1..max_len edges, with distinct vertices
// and consecutive vertices adjacent, found by brute-force enumeration of all
// interior tuples. Optionally ignores the direct edge {s, t}.
inline std::set<std::vector<NodeId>> simple_paths(const Graph& g, NodeId s, NodeId t, unsigned max_len,
                                                  bool drop_direct_edge) {
  const Dense a = adjacency_matrix(g);
  auto adjacent = [&](NodeId u, NodeId v) {
    if (drop_direct_edge && ((u == s && v == t) || (u == t && v == s))) return false;
    return a[u][v] != 0.0;
  };
  const std::size_t n = g.num_nodes();
  std::set<std::vector<NodeId>> out;
  for (unsigned len = 1; len <= max_len; ++len) {
    const unsigned interior = len - 1;
    std::vector<NodeId> mid(interior, 0);
    while (true) {
      std::vector<NodeId> seq{s};
      seq.insert(seq.end(), mid.begin(), mid.end());
      seq.push_back(t);
      std::vector<NodeId> sorted = seq;
      std::sort(sorted.begin(), sorted.end());
      bool ok = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      for (std::size_t k = 0; ok && k + 1 < seq.size(); ++k) ok = adjacent(seq[k], seq[k + 1]);
      if (ok) out.insert(seq);
      // odometer increment
      std::size_t pos = 0;
      while (pos < interior && ++mid[pos] == n) mid[pos++] = 0;
      if (pos == interior) break;
    }
  }
  return out;
}

inline double hits_at_k(const std::vector<double>& pos, std::vector<double> neg, std::size_t k) {
  if (neg.size() < k) return 1.0;
  std::sort(neg.begin(), neg.end(), std::greater<>());
  const double threshold = neg[k - 1];
  std::size_t hit = 0;
  for (double p : pos) hit += p > threshold ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(pos.size());
}

// Ranks the positive among all candidates after sorting descending with the
// positive placed behind every negative of equal score.
inline double mrr(const std::vector<std::pair<double, std::vector<double>>>& sets) {
  double total = 0.0;
  for (const auto& [p, negs] : sets) {
    std::vector<std::pair<double, int>> all;
    for (double x : negs) all.emplace_back(x, 0);
    all.emplace_back(p, 1);
    std::sort(all.begin(), all.end(), [](auto l, auto r) {
      if (l.first != r.first) return l.first > r.first;
      return l.second < r.second;
    });
    for (std::size_t r = 0; r < all.size(); ++r) {
      if (all[r].second == 1) {
        total += 1.0 / static_cast<double>(r + 1);
        break;
      }
    }
  }
  return total / static_cast<double>(sets.size());
}

inline double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double s = 0.0;
  for (double p : pos)
    for (double q : neg) s += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return s / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng, std::size_t feature_dim = 0) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  if (feature_dim == 0) return Graph::from_edges(n, edges);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n * feature_dim);
  for (double& v : x) v = normal(rng);
  return Graph::from_edges(n, edges, std::move(x), feature_dim);
}

// The seven-node example graph: a..g = 0..6, targets a and b.
inline Graph figure_two_graph() {
  const std::vector<Edge> e{{0, 2}, {2, 1}, {0, 3}, {3, 4}, {4, 1}, {0, 5}, {5, 3}, {0, 6}};
  return Graph::from_edges(7, e);
}

// Biases start at zero, which parks many ReLU pre-activations right on the
// kink; finite differences need a point away from it.
inline void randomize_biases(nn::ParamStore& p, std::mt19937_64& rng, double width = 0.5) {
  std::uniform_real_distribution<double> u(-width, width);
  for (auto& param : p) {
    if (!param.name.ends_with(".bias")) continue;
    for (std::size_t k = 0; k < param.value.size(); ++k) param.value[k] = u(rng);
  }
}

}  // namespace seg::oracle
