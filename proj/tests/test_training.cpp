#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "seg/error.hpp"
#include "seg/parallel.hpp"
#include "seg/structure.hpp"
#include "seg/synthetic.hpp"
#include "seg/training.hpp"

using namespace seg;

namespace {

// Scores on a coarse grid so ties are common.
std::vector<double> coarse_scores(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 9);
  std::vector<double> out(n);
  for (double& x : out) x = d(rng) / 10.0;
  return out;
}

SegConfig tiny_config() {
  SegConfig c;
  c.struct_hidden = 8;
  c.embed_dim = 8;
  c.fusion_dim = 8;
  c.gnn_hidden = 8;
  c.sortpool_k = 5;
  c.predictor_hidden = 16;
  return c;
}

SynthOptions small_synth() {
  SynthOptions o;
  o.num_nodes = 200;
  o.pool_negatives = 100;
  o.rank_negatives = 10;
  return o;
}

}  // namespace

TEST_CASE("Hits@K and MRR agree with sort-based oracles") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pos = coarse_scores(1 + trial % 17, rng);
    const auto neg = coarse_scores(trial % 40, rng);
    for (std::size_t k : {1u, 3u, 10u, 50u}) {
      if (neg.empty()) {
        CHECK_THROWS_AS(hits_at_k(pos, neg, k), InvalidInputError);
        continue;
      }
      CHECK(hits_at_k(pos, neg, k) == oracle::hits_at_k(pos, neg, k));
    }
    std::vector<CandidateSet> sets;
    std::vector<std::pair<double, std::vector<double>>> plain;
    for (std::size_t q = 0; q < 1 + trial % 5; ++q) {
      CandidateSet c{coarse_scores(1, rng)[0], coarse_scores(1 + q, rng)};
      plain.emplace_back(c.positive, c.negatives);
      sets.push_back(std::move(c));
    }
    CHECK(mean_reciprocal_rank(sets) == oracle::mrr(plain));
    if (!neg.empty()) CHECK(roc_auc(pos, neg) == doctest::Approx(oracle::auc(pos, neg)).epsilon(1e-15));
  }
}

TEST_CASE("metric edge cases") {
  const std::vector<double> neg{0.5, 0.5, 0.2};
  CHECK(hits_at_k(std::vector<double>{0.5}, neg, 1) == 0.0);  // a tie is not a hit
  CHECK(hits_at_k(std::vector<double>{0.51}, neg, 1) == 1.0);
  CHECK(hits_at_k(std::vector<double>{0.0}, neg, 4) == 1.0);  // fewer than K negatives
  CHECK(pessimistic_rank({0.5, {0.5, 0.7, 0.1}}) == 3);
  CHECK(pessimistic_rank({0.9, {0.5, 0.7}}) == 1);
  CHECK(roc_auc(std::vector<double>{0.5}, std::vector<double>{0.5}) == 0.5);
  CHECK_THROWS_AS(hits_at_k(std::vector<double>{}, neg, 1), InvalidInputError);
  CHECK_THROWS_AS(hits_at_k(neg, neg, 0), InvalidInputError);
  CHECK_THROWS_AS(mean_reciprocal_rank(std::vector<CandidateSet>{}), InvalidInputError);
  CHECK_THROWS_AS(mean_reciprocal_rank(std::vector<CandidateSet>{{0.1, {}}}), InvalidInputError);

  const std::vector<std::size_t> ks{1, 2};
  const std::vector<CandidateSet> sets{{0.9, {0.1}}, {0.1, {0.9}}};
  const EvalReport r = make_report({0.9, 0.3}, {0.5, 0.1}, ks, sets);
  CHECK(r.hits.at(1) == 0.5);
  CHECK(r.hits.at(2) == 1.0);
  CHECK(*r.mrr == 0.75);
  CHECK(r.auc == 0.75);
  nlohmann::json j = r;
  CHECK(j["mrr"] == 0.75);
  CHECK(r.table().find("hits@2") != std::string::npos);
}

TEST_CASE("negative sampling") {
  std::mt19937_64 rng(2);
  const Graph g = oracle::random_graph(30, 0.2, rng);
  const EdgeSet forbidden{pair_key(0, 1), pair_key(2, 3)};
  const auto neg = sample_negatives(g, 200, 77, forbidden);
  CHECK(neg.size() == 200);
  EdgeSet seen;
  for (auto [u, v] : neg) {
    CHECK(u < v);
    CHECK_FALSE(g.has_edge(u, v));
    CHECK_FALSE(forbidden.contains(pair_key(u, v)));
    CHECK(seen.insert(pair_key(u, v)).second);
  }
  CHECK(sample_negatives(g, 200, 77, forbidden) == neg);

  std::vector<Edge> all;
  for (NodeId u = 0; u < 4; ++u)
    for (NodeId v = u + 1; v < 4; ++v) all.emplace_back(u, v);
  const Graph complete = Graph::from_edges(4, all);
  CHECK_THROWS_AS(sample_negatives(complete, 1, 1), SaturationError);
}

TEST_CASE("synthetic benchmark invariants") {
  const SynthOptions o = small_synth();
  const SyntheticBenchmark b = generate_synthetic_benchmark(o);
  const Graph& g = b.graph;
  CHECK(g.num_nodes() == 200);
  CHECK(g.feature_dim() == o.feature_dim);
  CHECK_FALSE(b.splits.test_pos.empty());
  CHECK_NOTHROW(b.splits.validate(g));
  for (const auto* held : {&b.splits.valid_pos, &b.splits.test_pos}) {
    for (auto [u, v] : *held) {
      CHECK_FALSE(g.has_edge(u, v));
      CHECK(heuristic_score(g, u, v, Heuristic::CommonNeighbors) >= 2.0);
    }
  }
  CHECK(b.splits.test_neg.size() == o.pool_negatives);
  for (auto [u, v] : b.splits.test_neg) CHECK(heuristic_score(g, u, v, Heuristic::CommonNeighbors) == 0.0);
  for (const auto& q : b.splits.test_rank) {
    CHECK(q.negatives.size() == o.rank_negatives);
    for (NodeId w : q.negatives) CHECK(heuristic_score(g, q.positive.first, w, Heuristic::CommonNeighbors) == 0.0);
  }
  CHECK(b.splits.train_pos.size() == g.num_edges());

  const SyntheticBenchmark again = generate_synthetic_benchmark(o);
  CHECK(again.graph == g);
  CHECK(again.splits.test_pos == b.splits.test_pos);

  SynthOptions tiny;
  tiny.num_nodes = 50;
  CHECK_THROWS_AS(generate_synthetic_benchmark(tiny), InvalidInputError);
}

TEST_CASE("splits survive a write/read cycle") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  const auto dir = std::filesystem::temp_directory_path() / "seg_test_splits";
  std::filesystem::remove_all(dir);
  write_splits(dir, b.splits, nlohmann::json{{"seed", 7}});
  const SplitDataset back = read_splits(dir);
  CHECK(back.train_pos == b.splits.train_pos);
  CHECK(back.valid_pos == b.splits.valid_pos);
  CHECK(back.test_pos == b.splits.test_pos);
  CHECK(back.test_neg == b.splits.test_neg);
  REQUIRE(back.test_rank.size() == b.splits.test_rank.size());
  for (std::size_t k = 0; k < back.test_rank.size(); ++k) {
    CHECK(back.test_rank[k].positive == b.splits.test_rank[k].positive);
    CHECK(back.test_rank[k].negatives == b.splits.test_rank[k].negatives);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("split validation") {
  const Graph g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}});
  SplitDataset s;
  s.train_pos = {{0, 1}, {1, 2}};
  s.test_pos = {{0, 2}};
  CHECK_NOTHROW(s.validate(g));
  s.test_neg = {{0, 2}};
  CHECK_THROWS_AS(s.validate(g), InvalidInputError);
  s.test_neg = {{0, 3}};
  s.valid_pos = {{1, 2}};
  CHECK_THROWS_AS(s.validate(g), InvalidInputError);
  s.valid_pos.clear();
  s.train_pos.push_back({2, 3});
  CHECK_THROWS_AS(s.validate(g), InvalidInputError);
}

TEST_CASE("parallel_for") {
  std::vector<int> out(1000, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  std::atomic<int> calls{0};
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [&](std::size_t i) {
                                 ++calls;
                                 if (i == 17) throw NumericError("boom");
                               }),
                  NumericError);
  CHECK(resolve_threads(0) >= 1);
  CHECK(resolve_threads(3) == 3);
}

TEST_CASE("training is deterministic and thread-count independent") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  const SegModel m(tiny_config(), b.graph.feature_dim());
  TrainConfig t;
  t.epochs = 3;
  t.pos_fraction = 0.1;
  t.batch_size = 8;
  t.threads = 1;
  const TrainResult a = train(m, b.graph, b.splits, t);
  t.threads = 3;
  const TrainResult c = train(m, b.graph, b.splits, t);
  CHECK(a.loss_curve.size() == 3);
  CHECK(a.loss_curve == c.loss_curve);
  for (std::size_t i = 0; i < a.params.size(); ++i) CHECK(a.params[i].value == c.params[i].value);

  const std::vector<std::size_t> ks{10};
  const EvalReport ra = evaluate(m, a.params, b.graph, b.splits, Split::Test, ks, 1);
  const EvalReport rc = evaluate(m, c.params, b.graph, b.splits, Split::Test, ks, 4);
  CHECK(nlohmann::json(ra).dump() == nlohmann::json(rc).dump());
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  const SegModel m(tiny_config(), b.graph.feature_dim());
  TrainConfig t;
  t.epochs = 1;
  t.lr = 0.0;
  t.pos_fraction = 0.05;
  const nn::ParamStore init = m.init_params(t.seed);
  std::vector<std::pair<std::size_t, double>> seen;
  const TrainResult r = train(m, b.graph, b.splits, t, [&](std::size_t e, double l) { seen.emplace_back(e, l); });
  CHECK(r.loss_curve.size() == 1);
  CHECK(seen.size() == 1);
  CHECK(seen[0].first == 1);
  for (std::size_t i = 0; i < init.size(); ++i) CHECK(r.params[i].value == init[i].value);

  t.epochs = 0;
  const TrainResult none = train(m, b.graph, b.splits, t);
  CHECK(none.loss_curve.empty());
}

TEST_CASE("training rejects bad input") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  const SegModel m(tiny_config(), b.graph.feature_dim());
  TrainConfig t;
  t.batch_size = 0;
  CHECK_THROWS_AS(train(m, b.graph, b.splits, t), InvalidInputError);
  t = TrainConfig{};
  SplitDataset empty;
  CHECK_THROWS_AS(train(m, b.graph, empty, t), InvalidInputError);
  const SegModel other(tiny_config(), 0);
  CHECK_THROWS_AS(train(m, b.graph, b.splits, t, other.init_params(1)), FormatError);
}

TEST_CASE("config JSON round-trip") {
  SegConfig c;
  c.lambda = 6;
  c.variant = Variant::SegGnn;
  c.backbone = Backbone::Gcn;
  c.labeling = LabelScheme::Drnl;
  const SegConfig back = nlohmann::json(c).get<SegConfig>();
  CHECK(nlohmann::json(back) == nlohmann::json(c));
  TrainConfig t;
  t.lr = 0.01;
  t.hits_k = {20};
  CHECK(nlohmann::json(nlohmann::json(t).get<TrainConfig>()) == nlohmann::json(t));
  CHECK_THROWS_AS(nlohmann::json({{"variant", "nope"}}).get<SegConfig>(), Error);
  CHECK(parse_variant("seg-se") == Variant::SegSe);
}

TEST_CASE("metric properties: monotone in K, order-free") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto pos = coarse_scores(1 + trial % 13, rng);
    auto neg = coarse_scores(1 + trial % 29, rng);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 40; ++k) {
      const double h = hits_at_k(pos, neg, k);
      CHECK(h >= prev);
      prev = h;
    }
    const std::vector<std::size_t> ks{1, 5, 20};
    const std::vector<CandidateSet> sets{{pos[0], neg}};
    const auto before = nlohmann::json(make_report(pos, neg, ks, sets));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    const std::vector<CandidateSet> shuffled{{sets[0].positive, neg}};
    auto after = nlohmann::json(make_report(pos, neg, ks, shuffled));
    for (const char* key : {"hits", "mrr", "auc"}) CHECK(after[key] == before[key]);
  }
}

TEST_CASE("common neighbors separate the synthetic benchmark perfectly") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  const std::vector<std::size_t> ks{10, 50};
  const EvalReport r = evaluate(
      [&](NodeId u, NodeId v) { return heuristic_score(b.graph, u, v, Heuristic::CommonNeighbors); }, b.splits,
      Split::Test, ks, 1);
  CHECK(r.auc == 1.0);
  CHECK(*r.mrr == 1.0);
  CHECK(r.hits.at(10) == 1.0);
}

TEST_CASE("SEG-SE and SEG-GNN train under the same harness") {
  const SyntheticBenchmark b = generate_synthetic_benchmark(small_synth());
  TrainConfig t;
  t.epochs = 2;
  t.pos_fraction = 0.1;
  for (Variant v : {Variant::SegSe, Variant::SegGnn, Variant::FeatureMlp}) {
    SegConfig c = tiny_config();
    c.variant = v;
    const SegModel m(c, b.graph.feature_dim());
    const TrainResult r = train(m, b.graph, b.splits, t);
    CHECK(r.loss_curve.size() == 2);
    const std::vector<std::size_t> ks{10};
    CHECK_NOTHROW(evaluate(m, r.params, b.graph, b.splits, Split::Valid, ks, 1));
  }
}
