#include "seg/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "seg/error.hpp"

namespace seg {

namespace {

// Hop distance from `source` to every node of g, ignoring `blocked`.
std::vector<int> distances_without(const Graph& g, NodeId source, long blocked) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] >= 0 || static_cast<long>(v) == blocked) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

class PathSearch {
 public:
  PathSearch(const Graph& g, NodeId from, NodeId to, unsigned max_len, std::size_t limit,
             PathSet& out)
      : g_(g), to_(to), max_len_(max_len), limit_(limit), out_(out),
        on_path_(g.num_nodes(), false),
        dist_to_target_(distances_without(g, to, -1)) {
    stack_.push_back(from);
    on_path_[from] = true;
  }

  void run() { extend(); }

 private:
  void extend() {
    const NodeId u = stack_.back();
    const unsigned used = static_cast<unsigned>(stack_.size() - 1);
    for (NodeId v : g_.neighbors(u)) {
      if (on_path_[v]) continue;
      if (v == to_) {
        record(v);
        continue;
      }
      // Shortest remaining distance must still fit in the budget.
      const int rest = dist_to_target_[v];
      if (rest < 0 || used + 1 + static_cast<unsigned>(rest) > max_len_) continue;
      stack_.push_back(v);
      on_path_[v] = true;
      extend();
      on_path_[v] = false;
      stack_.pop_back();
    }
  }

  void record(NodeId last) {
    if (limit_ != 0 && out_.paths.size() >= limit_) {
      throw PathLimitError("more than " + std::to_string(limit_) +
                           " simple paths between targets; subgraph too dense for path labeling");
    }
    auto& p = out_.paths.emplace_back(stack_);
    p.push_back(last);
  }

  const Graph& g_;
  NodeId to_;
  unsigned max_len_;
  std::size_t limit_;
  PathSet& out_;
  std::vector<bool> on_path_;
  std::vector<int> dist_to_target_;
  std::vector<NodeId> stack_;
};

}  // namespace

PathSet enumerate_simple_paths(const EnclosingSubgraph& sub, unsigned max_len,
                               std::size_t path_limit) {
  if (max_len == 0) throw InvalidInputError("max path length must be >= 1");
  PathSet ps;
  ps.max_len = max_len;
  PathSearch(sub.local_graph, sub.target_a, sub.target_b, max_len, path_limit, ps).run();
  return ps;
}

std::string_view to_string(LabelScheme s) {
  return s == LabelScheme::PathLabeling ? "pl" : "drnl";
}

LabelScheme parse_label_scheme(std::string_view s) {
  if (s == "pl") return LabelScheme::PathLabeling;
  if (s == "drnl") return LabelScheme::Drnl;
  throw InvalidInputError("unknown labeling scheme '" + std::string(s) + "' (expected pl|drnl)");
}

LabelAssignment path_label(const EnclosingSubgraph& sub, const PathSet& paths, int lambda) {
  if (lambda < 1) throw InvalidInputError("lambda must be >= 1");
  LabelAssignment la;
  la.scheme = LabelScheme::PathLabeling;
  la.max_label = lambda;
  la.labels.assign(sub.size(), lambda);
  for (const auto& p : paths.paths) {
    // A path with e edges labels its interior e - 1.
    const int label = static_cast<int>(p.size()) - 2;
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
      la.labels[p[k]] = std::min(la.labels[p[k]], label);
    }
  }
  la.labels[sub.target_a] = 0;
  la.labels[sub.target_b] = 0;
  return la;
}

LabelAssignment path_label(const EnclosingSubgraph& sub, int lambda, std::size_t path_limit) {
  if (lambda < 1) throw InvalidInputError("lambda must be >= 1");
  return path_label(sub, enumerate_simple_paths(sub, static_cast<unsigned>(lambda), path_limit),
                    lambda);
}

int drnl_value(int dist_a, int dist_b) {
  const int d = dist_a + dist_b;
  const int half = d / 2;
  return 1 + std::min(dist_a, dist_b) + half * (half + d % 2 - 1);
}

LabelAssignment drnl_label(const EnclosingSubgraph& sub) {
  const Graph& g = sub.local_graph;
  const auto from_a = distances_without(g, sub.target_a, sub.target_b);
  const auto from_b = distances_without(g, sub.target_b, sub.target_a);
  LabelAssignment la;
  la.scheme = LabelScheme::Drnl;
  la.labels.assign(sub.size(), 0);
  for (std::size_t u = 0; u < sub.size(); ++u) {
    if (u == sub.target_a || u == sub.target_b) {
      la.labels[u] = 1;
    } else if (from_a[u] >= 0 && from_b[u] >= 0) {
      la.labels[u] = drnl_value(from_a[u], from_b[u]);
    }
    la.max_label = std::max(la.max_label, la.labels[u]);
  }
  return la;
}

nn::Tensor one_hot_encode(const LabelAssignment& la, int lambda) {
  if (lambda < 0) throw InvalidInputError("one-hot width must be positive");
  nn::Tensor out(la.labels.size(), static_cast<std::size_t>(lambda) + 1);
  for (std::size_t u = 0; u < la.labels.size(); ++u) {
    if (la.labels[u] < 0) throw InvalidInputError("negative structural label");
    out(u, static_cast<std::size_t>(std::min(la.labels[u], lambda))) = 1.0;
  }
  return out;
}

std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::CommonNeighbors: return "cn";
    case Heuristic::Jaccard: return "jaccard";
    case Heuristic::AdamicAdar: return "aa";
    case Heuristic::Katz: return "katz";
  }
  return "?";
}

Heuristic parse_heuristic(std::string_view s) {
  if (s == "cn") return Heuristic::CommonNeighbors;
  if (s == "jaccard") return Heuristic::Jaccard;
  if (s == "aa") return Heuristic::AdamicAdar;
  if (s == "katz") return Heuristic::Katz;
  throw InvalidInputError("unknown heuristic '" + std::string(s) + "' (expected cn|jaccard|aa|katz)");
}

namespace {

template <class Fn>
std::size_t for_each_common(std::span<const NodeId> a, std::span<const NodeId> b, Fn&& fn) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      fn(*ia);
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

double katz(const Graph& g, NodeId i, NodeId j, const KatzParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw InvalidInputError("katz alpha must lie in (0, 1)");
  if (p.max_len < 1) throw InvalidInputError("katz max_len must be >= 1");
  // walks[v] = number of length-l walks from i to v.
  std::vector<double> walks(g.num_nodes(), 0.0), next(g.num_nodes());
  walks[i] = 1.0;
  double weight = 1.0;
  double score = 0.0;
  for (unsigned l = 1; l <= p.max_len; ++l) {
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      if (walks[u] == 0.0) continue;
      for (NodeId v : g.neighbors(u)) next[v] += walks[u];
    }
    walks.swap(next);
    weight *= p.alpha;
    score += weight * walks[j];
  }
  return score;
}

}  // namespace

double heuristic_score(const Graph& g, NodeId i, NodeId j, Heuristic kind, const KatzParams& katz_params) {
  if (i == j) throw InvalidPairError("heuristic score needs two distinct nodes");
  const auto ni = g.neighbors(i);
  const auto nj = g.neighbors(j);
  switch (kind) {
    case Heuristic::CommonNeighbors:
      return static_cast<double>(for_each_common(ni, nj, [](NodeId) {}));
    case Heuristic::Jaccard: {
      const auto common = for_each_common(ni, nj, [](NodeId) {});
      const auto uni = ni.size() + nj.size() - common;
      return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
    }
    case Heuristic::AdamicAdar: {
      double s = 0.0;
      for_each_common(ni, nj, [&](NodeId w) {
        const auto d = g.degree(w);
        if (d > 1) s += 1.0 / std::log(static_cast<double>(d));
      });
      return s;
    }
    case Heuristic::Katz:
      return katz(g, i, j, katz_params);
  }
  return 0.0;
}

}  // namespace seg
