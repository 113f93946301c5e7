#include "seg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "seg/error.hpp"

namespace seg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on spaces/tabs.
std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected non-negative integer node id, got '" + std::string(tok) + "'");
  }
  return v;
}

double parse_value(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected decimal value, got '" + std::string(tok) + "'");
  }
  return v;
}

constexpr std::string_view kNodeCountTag = "# num_nodes:";

// Calls fn(tokens, line_no) for every non-comment line. Returns the node count
// declared by a "# num_nodes: N" header, or 0.
template <class Fn>
std::size_t for_each_data_line(std::istream& in, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  std::size_t declared = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with(kNodeCountTag)) {
        declared = parse_id(trim(line.substr(kNodeCountTag.size())), line_no);
      }
      continue;
    }
    fn(tokenize(line), line_no);
  }
  return declared;
}

class IdMapper {
 public:
  explicit IdMapper(bool remap) : remap_(remap) {}

  NodeId operator()(std::uint64_t external, std::size_t line) {
    if (!remap_) {
      if (external >= std::numeric_limits<NodeId>::max()) {
        throw ParseError(line, "node id " + std::to_string(external) + " exceeds supported range");
      }
      return static_cast<NodeId>(external);
    }
    auto [it, inserted] = ids_.try_emplace(external, static_cast<NodeId>(order_.size()));
    if (inserted) order_.push_back(external);
    return it->second;
  }

  std::vector<std::uint64_t> take_order() { return std::move(order_); }

 private:
  bool remap_;
  std::unordered_map<std::uint64_t, NodeId> ids_;
  std::vector<std::uint64_t> order_;
};

void write_double(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

}  // namespace

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  Graph g;
  std::vector<Edge> both;
  both.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw BoundsError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                        ") references node outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (u == v) continue;
    both.emplace_back(u, v);
    both.emplace_back(v, u);
  }
  std::sort(both.begin(), both.end());
  both.erase(std::unique(both.begin(), both.end()), both.end());

  g.offsets_.assign(num_nodes + 1, 0);
  for (auto [u, v] : both) ++g.offsets_[u + 1];
  for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.reserve(both.size());
  for (auto [u, v] : both) g.targets_.push_back(v);
  return g;
}

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                        std::vector<double> features, std::size_t feature_dim) {
  Graph g = from_edges(num_nodes, edges);
  if (feature_dim > 0 && features.size() != num_nodes * feature_dim) {
    throw FormatError("feature matrix has " + std::to_string(features.size()) +
                      " values, expected " + std::to_string(num_nodes) + " x " +
                      std::to_string(feature_dim));
  }
  g.features_ = std::move(features);
  g.feature_dim_ = feature_dim;
  if (feature_dim == 0) g.features_.clear();
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  if (u >= num_nodes()) {
    throw BoundsError("node " + std::to_string(u) + " out of range [0, " +
                      std::to_string(num_nodes()) + ")");
  }
  return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nu = neighbors(u);
  if (v >= num_nodes()) return false;
  return std::binary_search(nu.begin(), nu.end(), v);
}

std::span<const double> Graph::features(NodeId u) const {
  if (u >= num_nodes()) throw BoundsError("node " + std::to_string(u) + " out of range");
  if (!has_features()) return {};
  return {features_.data() + static_cast<std::size_t>(u) * feature_dim_, feature_dim_};
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::pair<std::span<const NodeId>, std::size_t> adjacency_query(const Graph& g, NodeId u) {
  auto nb = g.neighbors(u);
  return {nb, nb.size()};
}

LoadResult load_edge_list(std::istream& edges, std::istream* features,
                          const LoadOptions& options) {
  IdMapper map(options.remap_ids);
  std::vector<Edge> list;
  std::size_t num_nodes = 0;

  const std::size_t declared = for_each_data_line(edges, [&](const std::vector<std::string_view>& tok, std::size_t line) {
    if (tok.size() != 2) {
      throw ParseError(line, "expected 'u v', got " + std::to_string(tok.size()) + " fields");
    }
    const NodeId u = map(parse_id(tok[0], line), line);
    const NodeId v = map(parse_id(tok[1], line), line);
    num_nodes = std::max<std::size_t>(num_nodes, std::max(u, v) + std::size_t{1});
    list.emplace_back(u, v);
  });
  if (!options.remap_ids) num_nodes = std::max(num_nodes, declared);

  std::vector<std::pair<NodeId, std::vector<double>>> rows;
  std::size_t dim = 0;
  if (features != nullptr) {
    for_each_data_line(*features, [&](const std::vector<std::string_view>& tok, std::size_t line) {
      if (tok.size() < 2) throw ParseError(line, "feature line needs an id and at least one value");
      const NodeId u = map(parse_id(tok[0], line), line);
      if (dim == 0) {
        dim = tok.size() - 1;
      } else if (tok.size() - 1 != dim) {
        throw FormatError("line " + std::to_string(line) + ": feature dimension " +
                          std::to_string(tok.size() - 1) + " differs from " + std::to_string(dim));
      }
      std::vector<double> row(dim);
      for (std::size_t d = 0; d < dim; ++d) row[d] = parse_value(tok[d + 1], line);
      num_nodes = std::max<std::size_t>(num_nodes, u + std::size_t{1});
      rows.emplace_back(u, std::move(row));
    });
  }

  LoadResult result;
  if (dim > 0) {
    std::vector<double> matrix(num_nodes * dim, 0.0);
    for (auto& [u, row] : rows) {
      std::copy(row.begin(), row.end(), matrix.begin() + static_cast<std::ptrdiff_t>(u * dim));
    }
    result.graph = Graph::from_edges(num_nodes, list, std::move(matrix), dim);
  } else {
    result.graph = Graph::from_edges(num_nodes, list);
  }
  result.external_ids = map.take_order();
  return result;
}

std::vector<Edge> read_pairs(std::istream& in) {
  std::vector<Edge> out;
  for_each_data_line(in, [&](const std::vector<std::string_view>& tok, std::size_t line) {
    if (tok.size() != 2) throw ParseError(line, "expected 'u v'");
    const auto u = parse_id(tok[0], line);
    const auto v = parse_id(tok[1], line);
    if (u >= std::numeric_limits<NodeId>::max() || v >= std::numeric_limits<NodeId>::max()) {
      throw ParseError(line, "node id exceeds supported range");
    }
    out.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  });
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << kNodeCountTag << ' ' << g.num_nodes() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_features(std::ostream& out, const Graph& g) {
  if (!g.has_features()) return;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    out << u;
    for (double x : g.features(u)) {
      out << ' ';
      write_double(out, x);
    }
    out << '\n';
  }
}

void write_pairs(std::ostream& out, std::span<const Edge> pairs) {
  for (auto [u, v] : pairs) out << u << ' ' << v << '\n';
}

}  // namespace seg
