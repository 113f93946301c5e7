#include "seg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "seg/error.hpp"

namespace seg {

namespace {

using Adjacency = std::vector<std::vector<NodeId>>;

void link(Adjacency& adj, NodeId u, NodeId v) {
  adj[u].insert(std::lower_bound(adj[u].begin(), adj[u].end(), v), v);
  adj[v].insert(std::lower_bound(adj[v].begin(), adj[v].end(), u), u);
}

void unlink(Adjacency& adj, NodeId u, NodeId v) {
  adj[u].erase(std::lower_bound(adj[u].begin(), adj[u].end(), v));
  adj[v].erase(std::lower_bound(adj[v].begin(), adj[v].end(), u));
}

std::size_t common_neighbors(const Adjacency& adj, NodeId u, NodeId v) {
  std::size_t c = 0;
  auto a = adj[u].begin();
  auto b = adj[v].begin();
  while (a != adj[u].end() && b != adj[v].end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++c;
      ++a;
      ++b;
    }
  }
  return c;
}

// Preferential attachment with triad formation (Holme & Kim growth).
Adjacency grow_graph(const SynthOptions& opt, std::mt19937_64& rng) {
  const std::size_t n = opt.num_nodes;
  const std::size_t m = opt.edges_per_node;
  Adjacency adj(n);
  // Every edge endpoint once, so a uniform pick is degree-proportional.
  std::vector<NodeId> endpoints;
  for (NodeId u = 0; u <= m; ++u) {
    for (NodeId v = u + 1; v <= m; ++v) {
      link(adj, u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::vector<NodeId> chosen;
    NodeId anchor = 0;
    std::size_t guard = 0;
    while (chosen.size() < m && guard++ < 100 * m) {
      NodeId w;
      bool triad = !chosen.empty() && coin(rng) < opt.triad_prob;
      if (triad) {
        const auto& nb = adj[anchor];
        std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
        w = nb[pick(rng)];
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
        w = endpoints[pick(rng)];
      }
      if (w == v || std::find(chosen.begin(), chosen.end(), w) != chosen.end()) continue;
      chosen.push_back(w);
      if (!triad) anchor = w;
    }
    for (NodeId w : chosen) {
      link(adj, v, w);
      endpoints.push_back(v);
      endpoints.push_back(w);
    }
  }
  return adj;
}

}  // namespace

void to_json(nlohmann::json& j, const SynthOptions& o) {
  j = nlohmann::json{{"num_nodes", o.num_nodes},         {"edges_per_node", o.edges_per_node},
                     {"triad_prob", o.triad_prob},       {"feature_dim", o.feature_dim},
                     {"valid_fraction", o.valid_fraction}, {"test_fraction", o.test_fraction},
                     {"pool_negatives", o.pool_negatives}, {"rank_negatives", o.rank_negatives},
                     {"seed", o.seed}};
}

void from_json(const nlohmann::json& j, SynthOptions& o) {
  o.num_nodes = j.value("num_nodes", o.num_nodes);
  o.edges_per_node = j.value("edges_per_node", o.edges_per_node);
  o.triad_prob = j.value("triad_prob", o.triad_prob);
  o.feature_dim = j.value("feature_dim", o.feature_dim);
  o.valid_fraction = j.value("valid_fraction", o.valid_fraction);
  o.test_fraction = j.value("test_fraction", o.test_fraction);
  o.pool_negatives = j.value("pool_negatives", o.pool_negatives);
  o.rank_negatives = j.value("rank_negatives", o.rank_negatives);
  o.seed = j.value("seed", o.seed);
}

SyntheticBenchmark generate_synthetic_benchmark(const SynthOptions& opt) {
  if (opt.num_nodes < 100) throw InvalidInputError("synthetic benchmark needs at least 100 nodes");
  if (opt.edges_per_node < 2) throw InvalidInputError("synthetic benchmark needs edges_per_node >= 2");
  if (opt.valid_fraction < 0 || opt.test_fraction <= 0 || opt.valid_fraction + opt.test_fraction >= 0.5) {
    throw InvalidInputError("held-out fractions must be non-negative and sum below 0.5");
  }
  std::mt19937_64 rng(opt.seed);
  Adjacency adj = grow_graph(opt, rng);
  const std::size_t n = opt.num_nodes;

  std::vector<Edge> full;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      if (u < v) full.emplace_back(u, v);
    }
  }
  const EdgeSet full_set = make_edge_set(full);

  // Hold out edges that still close a triangle twice over once removed.
  std::vector<Edge> order = full;
  std::shuffle(order.begin(), order.end(), rng);
  const auto want_valid = static_cast<std::size_t>(std::llround(opt.valid_fraction * static_cast<double>(full.size())));
  const auto want_test = static_cast<std::size_t>(std::llround(opt.test_fraction * static_cast<double>(full.size())));
  std::vector<Edge> held;
  for (auto [u, v] : order) {
    if (held.size() >= want_valid + want_test) break;
    unlink(adj, u, v);
    if (common_neighbors(adj, u, v) >= 2) {
      held.emplace_back(u, v);
    } else {
      link(adj, u, v);
    }
  }
  // Later removals can erode earlier triangles; put those edges back.
  std::vector<Edge> kept;
  for (auto [u, v] : held) {
    if (common_neighbors(adj, u, v) >= 2) kept.emplace_back(u, v);
  }
  for (auto [u, v] : held) {
    if (common_neighbors(adj, u, v) < 2) link(adj, u, v);
  }
  // Re-linking only adds neighbors, so every kept pair still has CN >= 2.

  SyntheticBenchmark out;
  const std::size_t n_valid = std::min(want_valid, kept.size() * want_valid / std::max<std::size_t>(1, want_valid + want_test));
  out.splits.valid_pos.assign(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n_valid));
  out.splits.test_pos.assign(kept.begin() + static_cast<std::ptrdiff_t>(n_valid), kept.end());

  std::vector<Edge> observed;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      if (u < v) observed.emplace_back(u, v);
    }
  }
  out.splits.train_pos = observed;

  // Negatives: unlinked in the full graph and no common neighbor observed.
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  EdgeSet used;
  auto acceptable = [&](NodeId u, NodeId v) {
    return u != v && !full_set.contains(pair_key(u, v)) && common_neighbors(adj, u, v) == 0;
  };
  auto draw_pool = [&](std::size_t count) {
    std::vector<Edge> pool;
    std::size_t rejections = 0;
    while (pool.size() < count) {
      const NodeId u = pick(rng), v = pick(rng);
      if (!acceptable(u, v) || used.contains(pair_key(u, v))) {
        if (++rejections > kMaxConsecutiveRejections) throw SaturationError("cannot draw negative pool");
        continue;
      }
      rejections = 0;
      used.insert(pair_key(u, v));
      pool.emplace_back(std::min(u, v), std::max(u, v));
    }
    return pool;
  };
  out.splits.valid_neg = draw_pool(out.splits.valid_pos.empty() ? 0 : opt.pool_negatives);
  out.splits.test_neg = draw_pool(opt.pool_negatives);

  auto rank_set = [&](const std::vector<Edge>& positives) {
    std::vector<RankQuery> qs;
    for (auto e : positives) {
      std::vector<NodeId> candidates;
      for (NodeId w = 0; w < n; ++w) {
        if (acceptable(e.first, w)) candidates.push_back(w);
      }
      if (candidates.size() < opt.rank_negatives) {
        throw SaturationError("node " + std::to_string(e.first) + " has only " + std::to_string(candidates.size()) +
                              " ranking candidates, " + std::to_string(opt.rank_negatives) + " requested");
      }
      // Partial Fisher-Yates: the first rank_negatives slots become the sample.
      for (std::size_t k = 0; k < opt.rank_negatives; ++k) {
        std::uniform_int_distribution<std::size_t> slot(k, candidates.size() - 1);
        std::swap(candidates[k], candidates[slot(rng)]);
      }
      candidates.resize(opt.rank_negatives);
      qs.push_back({e, std::move(candidates)});
    }
    return qs;
  };
  if (opt.rank_negatives > 0) {
    out.splits.valid_rank = rank_set(out.splits.valid_pos);
    out.splits.test_rank = rank_set(out.splits.test_pos);
  }

  std::vector<double> features;
  if (opt.feature_dim > 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    features.resize(n * opt.feature_dim);
    for (double& x : features) x = normal(rng);
  }
  out.graph = Graph::from_edges(n, observed, std::move(features), opt.feature_dim);
  return out;
}

}  // namespace seg
