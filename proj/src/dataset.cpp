#include "seg/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "seg/error.hpp"

namespace seg {

namespace fs = std::filesystem;

EdgeSet make_edge_set(std::span<const Edge> edges) {
  EdgeSet s;
  s.reserve(edges.size() * 2);
  for (auto [u, v] : edges) s.insert(pair_key(u, v));
  return s;
}

EdgeSet SplitDataset::all_positives() const {
  EdgeSet s;
  for (const auto* list : {&train_pos, &valid_pos, &test_pos}) {
    for (auto [u, v] : *list) s.insert(pair_key(u, v));
  }
  return s;
}

void SplitDataset::validate(const Graph& g) const {
  const EdgeSet train = make_edge_set(train_pos);
  const EdgeSet valid = make_edge_set(valid_pos);
  for (auto [u, v] : train_pos) {
    if (u >= g.num_nodes() || v >= g.num_nodes() || !g.has_edge(u, v)) {
      throw InvalidInputError("training positive (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") is not an edge of the training graph");
    }
  }
  for (auto [u, v] : valid_pos) {
    if (train.contains(pair_key(u, v))) throw InvalidInputError("valid positive also in train split");
  }
  for (auto [u, v] : test_pos) {
    const auto k = pair_key(u, v);
    if (train.contains(k) || valid.contains(k)) {
      throw InvalidInputError("test positive (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") also in another split");
    }
  }
  const EdgeSet pos = all_positives();
  auto check_neg = [&](NodeId u, NodeId v) {
    if (u == v) throw InvalidInputError("negative pair is a self-loop");
    if (pos.contains(pair_key(u, v))) {
      throw InvalidInputError("pair (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") is both positive and negative");
    }
  };
  for (const auto* list : {&valid_neg, &test_neg}) {
    for (auto [u, v] : *list) check_neg(u, v);
  }
  for (const auto* list : {&valid_rank, &test_rank}) {
    for (const auto& q : *list) {
      for (NodeId w : q.negatives) check_neg(q.positive.first, w);
    }
  }
}

std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::mt19937_64& rng,
                                   const EdgeSet& forbidden) {
  const std::size_t n = g.num_nodes();
  if (count == 0) return {};
  if (n < 2) throw SaturationError("graph has fewer than two nodes; no negative pair exists");
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<Edge> out;
  out.reserve(count);
  EdgeSet taken;
  std::size_t rejections = 0;
  while (out.size() < count) {
    const NodeId u = pick(rng);
    const NodeId v = pick(rng);
    const auto key = pair_key(u, v);
    if (u == v || g.has_edge(u, v) || forbidden.contains(key) || taken.contains(key)) {
      if (++rejections > kMaxConsecutiveRejections) {
        throw SaturationError("negative sampling saturated after " + std::to_string(out.size()) + " of " +
                              std::to_string(count) + " pairs; graph is too dense");
      }
      continue;
    }
    rejections = 0;
    taken.insert(key);
    out.emplace_back(std::min(u, v), std::max(u, v));
  }
  return out;
}

std::vector<Edge> sample_negatives(const Graph& g, std::size_t count, std::uint64_t seed,
                                   const EdgeSet& forbidden) {
  std::mt19937_64 rng(seed);
  return sample_negatives(g, count, rng, forbidden);
}

namespace {

void write_header(std::ostream& out, const nlohmann::json& header) {
  if (!header.is_null()) out << "# " << header.dump() << '\n';
}

void write_pair_file(const fs::path& p, std::span<const Edge> pairs, const nlohmann::json& header) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  write_header(out, header);
  write_pairs(out, pairs);
}

void write_rank_file(const fs::path& p, std::span<const RankQuery> qs, const nlohmann::json& header) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  write_header(out, header);
  for (const auto& q : qs) {
    out << q.positive.first << ' ' << q.positive.second;
    for (NodeId w : q.negatives) out << ' ' << w;
    out << '\n';
  }
}

std::vector<Edge> read_pair_file(const fs::path& p, bool required) {
  std::ifstream in(p);
  if (!in) {
    if (required) throw IoError("cannot open " + p.string());
    return {};
  }
  return read_pairs(in);
}

std::vector<RankQuery> read_rank_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  std::vector<RankQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    std::vector<unsigned long long> ids;
    std::string tok;
    while (ss >> tok) {
      unsigned long long v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line_no, p.filename().string() + ": bad node id '" + tok + "'");
      }
      ids.push_back(v);
    }
    if (ids.empty()) continue;
    if (ids.size() < 3) throw ParseError(line_no, p.filename().string() + ": need 'u v w_1 ...'");
    RankQuery q;
    q.positive = {static_cast<NodeId>(ids[0]), static_cast<NodeId>(ids[1])};
    for (std::size_t k = 2; k < ids.size(); ++k) q.negatives.push_back(static_cast<NodeId>(ids[k]));
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

void write_splits(const fs::path& dir, const SplitDataset& s, const nlohmann::json& header) {
  fs::create_directories(dir);
  write_pair_file(dir / "train.txt", s.train_pos, header);
  write_pair_file(dir / "valid.txt", s.valid_pos, header);
  write_pair_file(dir / "test.txt", s.test_pos, header);
  if (!s.valid_neg.empty()) write_pair_file(dir / "valid_neg.txt", s.valid_neg, header);
  if (!s.test_neg.empty()) write_pair_file(dir / "test_neg.txt", s.test_neg, header);
  if (!s.valid_rank.empty()) write_rank_file(dir / "valid_rank.txt", s.valid_rank, header);
  if (!s.test_rank.empty()) write_rank_file(dir / "test_rank.txt", s.test_rank, header);
}

SplitDataset read_splits(const fs::path& dir) {
  SplitDataset s;
  s.train_pos = read_pair_file(dir / "train.txt", true);
  s.valid_pos = read_pair_file(dir / "valid.txt", false);
  s.test_pos = read_pair_file(dir / "test.txt", false);
  s.valid_neg = read_pair_file(dir / "valid_neg.txt", false);
  s.test_neg = read_pair_file(dir / "test_neg.txt", false);
  s.valid_rank = read_rank_file(dir / "valid_rank.txt");
  s.test_rank = read_rank_file(dir / "test_rank.txt");
  return s;
}

}  // namespace seg
