#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seg/error.hpp"
#include "seg/nn/checkpoint.hpp"
#include "seg/nn/gradcheck.hpp"
#include "seg/nn/layers.hpp"
#include "seg/nn/ops.hpp"

using namespace seg;
using namespace seg::nn;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(r, c);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = u(rng);
  return t;
}

// Scalarizes any output with a fixed random projection so every entry of the
// output gradient is distinct.
Var project(Var y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(hadamard(y, y.tape->constant(random_tensor(y.rows(), y.cols(), rng))));
}

// Central differences written out by hand, compared entry by entry against
// the tape.
void check_against_central_differences(ParamStore& p, const std::function<Var(Tape&)>& f, double tol = 1e-6) {
  Tape tape(&p);
  const Gradients analytic = grad(f(tape));
  const double h = 1e-6;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Tensor& w = p[i].value;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double orig = w[k];
      w[k] = orig + h;
      Tape t1(&p);
      const double up = f(t1).value()[0];
      w[k] = orig - h;
      Tape t2(&p);
      const double down = f(t2).value()[0];
      w[k] = orig;
      const double numeric = (up - down) / (2 * h);
      INFO(p[i].name, "[", k, "]");
      CHECK(std::abs(numeric - analytic[i][k]) <= tol * std::max(1.0, std::abs(numeric)));
    }
  }
}

Graph small_graph() {
  return Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {1, 3}});  // node 4 isolated
}

}  // namespace

TEST_CASE("tensor basics") {
  Tensor t(2, 3, 1.5);
  CHECK(t.size() == 6);
  CHECK(t(1, 2) == 1.5);
  CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK(Tensor::identity(3)(1, 1) == 1.0);
  CHECK(Tensor::identity(3)(0, 1) == 0.0);
}

TEST_CASE("elementwise and matrix ops have exact gradients") {
  std::mt19937_64 rng(1);
  ParamStore p;
  p.add("a", 3, 4);
  p.add("b", 4, 2);
  p.add("c", 3, 4);
  p.add("bias", 1, 4);
  p.value("a") = random_tensor(3, 4, rng);
  p.value("b") = random_tensor(4, 2, rng);
  p.value("c") = random_tensor(3, 4, rng);
  p.value("bias") = random_tensor(1, 4, rng);

  SUBCASE("matmul") { check_against_central_differences(p, [](Tape& t) { return project(matmul(t.param("a"), t.param("b")), 1); }); }
  SUBCASE("add, hadamard, scale") {
    check_against_central_differences(p, [](Tape& t) {
      return project(scale(hadamard(add(t.param("a"), t.param("c")), t.param("c")), -2.5), 2);
    });
  }
  SUBCASE("add_bias") {
    check_against_central_differences(p, [](Tape& t) { return project(add_bias(t.param("a"), t.param("bias")), 3); });
  }
  SUBCASE("relu, tanh, sigmoid") {
    check_against_central_differences(p, [](Tape& t) {
      return project(sigmoid(tanh(relu(add(t.param("a"), t.param("c"))))), 4);
    });
  }
  SUBCASE("select_rows with padding") {
    const std::vector<long> rows{2, -1, 0, 2};
    check_against_central_differences(p, [&](Tape& t) { return project(select_rows(t.param("a"), rows), 5); });
  }
  SUBCASE("concat and reshape") {
    check_against_central_differences(p, [](Tape& t) {
      std::vector<Var> cols{t.param("a"), t.param("c")};
      Var c = concat_cols(cols);
      std::vector<Var> rows{c, c};
      return project(reshape(concat_rows(rows), 1, 48), 6);
    });
  }
}

TEST_CASE("relu has zero gradient for negative inputs") {
  ParamStore p;
  p.add("x", 1, 3);
  p.value("x") = Tensor(1, 3, std::vector<double>{-1.0, 2.0, -0.5});
  Tape t(&p);
  const Gradients g = grad(sum(relu(t.param("x"))));
  CHECK(g[0] == Tensor(1, 3, std::vector<double>{0.0, 1.0, 0.0}));
}

TEST_CASE("a dead ReLU blocks gradient to the layer below") {
  std::mt19937_64 rng(3);
  ParamStore p;
  p.add("w1", 3, 4);
  p.value("w1") = random_tensor(3, 4, rng);
  p.add("w2", 4, 1);  // zero weights
  Tape t(&p);
  Var x = t.constant(random_tensor(2, 3, rng));
  const Gradients g = grad(sum(relu(matmul(relu(matmul(x, t.param("w1"))), t.param("w2")))));
  CHECK(g[0] == Tensor(3, 4));
}

TEST_CASE("sigmoid is stable for large inputs") {
  Tape t;
  Var s = sigmoid(t.constant(Tensor(1, 3, std::vector<double>{-800.0, 0.0, 800.0})));
  CHECK(s.value()[0] == 0.0);
  CHECK(s.value()[1] == 0.5);
  CHECK(s.value()[2] == 1.0);
}

TEST_CASE("bce matches a summation oracle and its gradient") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial;
    Tensor pr = random_tensor(n, 1, rng, 0.01, 0.99);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = (trial + k) % 2;
    double want = 0.0;
    for (std::size_t k = 0; k < n; ++k) want -= y[k] * std::log(pr[k]) + (1 - y[k]) * std::log(1 - pr[k]);
    want /= static_cast<double>(n);
    Tape t;
    CHECK(std::abs(bce(t.constant(pr), y).value()[0] - want) <= 1e-12);
  }
  ParamStore p;
  p.add("z", 4, 1);
  p.value("z") = random_tensor(4, 1, rng, -3, 3);
  const std::vector<double> y{1, 0, 0, 1};
  check_against_central_differences(p, [&](Tape& t) { return bce(sigmoid(t.param("z")), y); });

  Tape t;
  CHECK_THROWS_AS(bce(t.constant(Tensor(0, 1)), std::vector<double>{}), InvalidInputError);
  // Clamping keeps the loss finite at saturated probabilities.
  const double clamped = bce(t.constant(Tensor(1, 1, 0.0)), std::vector<double>{1.0}).value()[0];
  CHECK(clamped == doctest::Approx(-std::log(kProbClamp)));
}

TEST_CASE("tape diagnostics") {
  Tape t;
  Var x = t.constant(Tensor(1, 1, std::vector<double>{0.0}));
  try {
    t.record("log", Tensor(1, 1, -std::numeric_limits<double>::infinity()), {x.id}, {});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
  CHECK_THROWS_AS(t.backward(t.constant(Tensor(2, 1))), ShapeError);
  CHECK_THROWS_AS(matmul(t.constant(Tensor(2, 3)), t.constant(Tensor(2, 3))), ShapeError);
}

TEST_CASE("layer operators equal dense formulas") {
  const Graph g = small_graph();
  const Tensor a = [&] {
    const auto d = oracle::adjacency_matrix(g);
    Tensor t(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) t(i, j) = d[i][j];
    return t;
  }();
  const Tensor gcn = gcn_normalized_adjacency(g)->to_dense();
  const Tensor mean = mean_neighbor_operator(g)->to_dense();
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double di = static_cast<double>(g.degree(static_cast<NodeId>(i))) + 1.0;
      const double dj = static_cast<double>(g.degree(static_cast<NodeId>(j))) + 1.0;
      const double aij = a(i, j) + (i == j ? 1.0 : 0.0);
      CHECK(gcn(i, j) == doctest::Approx(aij / std::sqrt(di * dj)).epsilon(1e-14));
      const double deg = static_cast<double>(g.degree(static_cast<NodeId>(i)));
      CHECK(mean(i, j) == doctest::Approx(deg == 0 ? 0.0 : a(i, j) / deg).epsilon(1e-14));
    }
  }

  std::mt19937_64 rng(9);
  const Tensor h = random_tensor(5, 3, rng);
  const Tensor w = random_tensor(3, 2, rng);
  const Tensor w2 = random_tensor(3, 2, rng);
  Tape t;
  const Tensor out = gcn_layer(g, t.constant(h), t.constant(w)).value();
  const Tensor sage = sage_layer(g, t.constant(h), t.constant(w), t.constant(w2)).value();
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double acc = 0.0, self = 0.0, neigh = 0.0;
      for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
          acc += gcn(i, j) * h(j, k) * w(k, c);
          neigh += mean(i, j) * h(j, k) * w2(k, c);
        }
      for (std::size_t k = 0; k < 3; ++k) self += h(i, k) * w(k, c);
      CHECK(out(i, c) == doctest::Approx(std::max(0.0, acc)).epsilon(1e-12));
      CHECK(sage(i, c) == doctest::Approx(std::max(0.0, self + neigh)).epsilon(1e-12));
    }
  }
  // Isolated node: SAGE sees only its own term.
  CHECK(mean(4, 4) == 0.0);
}

TEST_CASE("GNN layers backpropagate correctly") {
  const Graph g = small_graph();
  std::mt19937_64 rng(10);
  ParamStore p;
  p.add("h", 5, 3);
  p.add("w", 3, 4);
  p.add("v", 3, 4);
  p.value("h") = random_tensor(5, 3, rng);
  p.value("w") = random_tensor(3, 4, rng);
  p.value("v") = random_tensor(3, 4, rng);
  check_against_central_differences(p, [&](Tape& t) { return project(gcn_layer(g, t.param("h"), t.param("w")), 11); });
  check_against_central_differences(
      p, [&](Tape& t) { return project(sage_layer(g, t.param("h"), t.param("w"), t.param("v")), 12); });
}

TEST_CASE("SortPooling order") {
  SUBCASE("sorted by the last channel, earlier channels break ties") {
    const Tensor h(5, 2, std::vector<double>{
                             0.0, 1.0,  // 0
                             5.0, 3.0,  // 1
                             2.0, 1.0,  // 2
                             9.0, 0.5,  // 3
                             2.0, 1.0,  // 4 identical to 2
                         });
    CHECK(sort_pooling_order(h, 5) == std::vector<long>{1, 2, 4, 0, 3});
    CHECK(sort_pooling_order(h, 2) == std::vector<long>{1, 2});
    CHECK(sort_pooling_order(h, 7) == std::vector<long>{1, 2, 4, 0, 3, -1, -1});
  }
  SUBCASE("readout pads with zeros and routes gradient to kept rows") {
    std::mt19937_64 rng(12);
    ParamStore p;
    p.add("h", 3, 2);
    p.value("h") = random_tensor(3, 2, rng);
    Tape t(&p);
    Var pooled = sort_pooling(t.param("h"), 5);
    CHECK(pooled.rows() == 5);
    CHECK(pooled.value()(4, 1) == 0.0);
    check_against_central_differences(p, [](Tape& tt) { return project(sort_pooling(tt.param("h"), 2), 13); });
  }
  SUBCASE("row permutation does not change the readout") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
      Tensor h = random_tensor(6, 3, rng);
      if (trial % 2) {
        for (std::size_t c = 0; c < 3; ++c) h(3, c) = h(1, c);  // exact tie
      }
      std::vector<long> perm{5, 2, 0, 4, 1, 3};
      Tape t;
      Tensor a = sort_pooling(t.constant(h), 4).value();
      Tensor b = sort_pooling(select_rows(t.constant(h), perm), 4).value();
      CHECK(a == b);
    }
  }
}

TEST_CASE("MLP: three layers match finite differences at 1e-4") {
  std::mt19937_64 rng(15);
  ParamStore p;
  const std::vector<std::size_t> dims{6, 8, 8, 3};
  init_mlp(p, "m", dims, rng);
  oracle::randomize_biases(p, rng);
  const Tensor x = random_tensor(4, 6, rng);
  auto loss = [&](Tape& t) { return project(mlp(t.constant(x), bind_mlp(t, "m", 3)), 16); };
  check_against_central_differences(p, loss);
  const GradCheckReport r = finite_diff_check(loss, p, {1e-5, 1e-4, 1e-6});
  CHECK(r.passed);
  CHECK(r.entries_checked == p.num_scalars());
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("init_mlp shapes and ranges") {
  std::mt19937_64 rng(16);
  ParamStore p;
  const std::vector<std::size_t> dims{16, 4, 1};
  init_mlp(p, "net", dims, rng);
  CHECK(p.size() == 4);
  CHECK(p.value("net.0.weight").rows() == 16);
  CHECK(p.value("net.1.weight").cols() == 1);
  CHECK(p.value("net.1.bias") == Tensor(1, 1));
  const Tensor& w = p.value("net.0.weight");
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(w[k]) <= 0.25);
  CHECK_THROWS_AS(p.add("net.0.weight", 1, 1), InvalidInputError);
}

TEST_CASE("gradient checker catches a wrong backward") {
  ParamStore p;
  p.add("x", 1, 3);
  p.value("x") = Tensor(1, 3, std::vector<double>{0.3, -0.2, 0.7});
  auto bad_square = [](Tape& t) {
    Var x = t.param("x");
    Tensor y = x.value();
    for (std::size_t k = 0; k < y.size(); ++k) y[k] *= y[k];
    const std::size_t xid = x.id;
    Var sq = t.record("bad_square", y, {xid}, [xid, xv = x.value()](Tape& tape, const Tensor& g) {
      Tensor d(g.rows(), g.cols());
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = g[k] * xv[k];  // missing factor 2
      tape.accumulate(xid, d);
    });
    return sum(sq);
  };
  const auto r = finite_diff_check(bad_square, p);
  CHECK_FALSE(r.passed);
  CHECK(r.worst_param == "x");
  CHECK(r.max_rel_error == doctest::Approx(0.5).epsilon(1e-6));
  // Parameters are restored.
  CHECK(p.value("x") == Tensor(1, 3, std::vector<double>{0.3, -0.2, 0.7}));
}

TEST_CASE("gradient checker rejects a non-deterministic loss") {
  ParamStore p;
  p.add("x", 1, 1);
  p.value("x")[0] = 1.0;
  int calls = 0;
  auto flaky = [&](Tape& t) { return scale(sum(t.param("x")), 1.0 + ++calls); };
  CHECK_THROWS_AS(finite_diff_check(flaky, p), DeterminismError);
}

TEST_CASE("Adam first step and bias correction") {
  ParamStore p;
  p.add("w", 1, 3);
  p.value("w") = Tensor(1, 3, std::vector<double>{1.0, 2.0, 3.0});
  const Gradients g{Tensor(1, 3, std::vector<double>{0.5, -2.0, 0.0})};
  const AdamOptions opt{0.1, 0.9, 0.999, 1e-8};
  adam_step(p, g, opt);
  CHECK(p.step() == 1);
  // After bias correction m_hat = g and v_hat = g^2.
  for (std::size_t k = 0; k < 3; ++k) {
    const double gk = g[0][k];
    const double want = std::vector<double>{1.0, 2.0, 3.0}[k] - 0.1 * gk / (std::abs(gk) + 1e-8);
    CHECK(p.value("w")[k] == doctest::Approx(want).epsilon(1e-12));
  }
  // Second step with the same gradient follows the recurrence.
  const Tensor before = p.value("w");
  adam_step(p, g, opt);
  const double m = 0.9 * (0.1 * 0.5) + 0.1 * 0.5;
  const double v = 0.999 * (0.001 * 0.25) + 0.001 * 0.25;
  const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
  CHECK(p.value("w")[0] == doctest::Approx(before[0] - 0.1 * mh / (std::sqrt(vh) + 1e-8)).epsilon(1e-12));

  const Gradients wrong{Tensor(3, 1)};
  CHECK_THROWS_AS(adam_step(p, wrong, opt), ShapeError);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  std::mt19937_64 rng(17);
  ParamStore p;
  init_mlp(p, "m", std::vector<std::size_t>{5, 7, 1}, rng);
  oracle::randomize_biases(p, rng);
  p.value("m.0.weight")(0, 0) = 1.0 / 3.0;
  p.value("m.0.weight")(0, 1) = 5e-324;
  p.value("m.0.weight")(0, 2) = -1.7976931348623157e308;
  p.set_step(42);
  const nlohmann::json cfg{{"lambda", 4}};
  std::stringstream ss;
  save_checkpoint(ss, p, cfg);
  const Checkpoint back = load_checkpoint(ss);
  CHECK(back.config == cfg);
  CHECK(back.params.step() == 42);
  REQUIRE(back.params.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(back.params[i].name == p[i].name);
    CHECK(back.params[i].value == p[i].value);
  }

  std::istringstream junk("{\"format\": \"other\"}");
  CHECK_THROWS_AS(load_checkpoint(junk), FormatError);
  std::istringstream broken("{not json");
  CHECK_THROWS_AS(load_checkpoint(broken), FormatError);
}
