#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seg/config.hpp"
#include "seg/error.hpp"
#include "seg/model.hpp"
#include "seg/nn/checkpoint.hpp"
#include "seg/nn/gradcheck.hpp"
#include "seg/nn/ops.hpp"
#include "seg/parallel.hpp"
#include "seg/structure.hpp"
#include "seg/synthetic.hpp"
#include "seg/training.hpp"

using namespace seg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOutputVersion = 1;

std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// Destination for line-oriented results: a file with a config header, or
// stdout without one.
class Sink {
 public:
  Sink(const std::string& path, const json& header) {
    if (path.empty()) return;
    file_ = open_out(path);
    file_ << "# " << header.dump() << '\n';
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct GraphFlags {
  std::string graph;
  std::string features;
};

Graph load_graph(const GraphFlags& f) {
  std::ifstream edges = open_in(f.graph);
  if (f.features.empty()) return load_edge_list(edges).graph;
  std::ifstream feats = open_in(f.features);
  return load_edge_list(edges, &feats).graph;
}

void add_graph_flags(CLI::App* cmd, GraphFlags& f, bool required = true) {
  auto* g = cmd->add_option("--graph", f.graph, "Edge list, one 'u v' per line")->check(CLI::ExistingFile);
  if (required) g->required();
  cmd->add_option("--features", f.features, "Node features, 'u f_1 ... f_D' per line")->check(CLI::ExistingFile);
}

std::vector<Edge> read_pairs_file(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_pairs(in);
}

// Model and training settings: config file first, explicit flags on top.
struct ConfigFlags {
  std::string config_file;
  std::optional<int> lambda;
  std::optional<unsigned> hops;
  std::optional<std::string> labeling, backbone, variant;
  std::optional<std::size_t> epochs, batch_size, threads;
  std::optional<double> lr, pos_fraction, neg_ratio;
  std::optional<std::uint64_t> seed;
  bool train_on_valid = false;
  std::vector<std::size_t> hits_k;
};

void add_model_flags(CLI::App* cmd, ConfigFlags& c) {
  cmd->add_option("--config", c.config_file, "JSON file with flat config keys; flags take precedence")
      ->check(CLI::ExistingFile);
  cmd->add_option("--lambda", c.lambda, "Path-length cap / label count");
  cmd->add_option("--k", c.hops, "Enclosing subgraph hops");
  cmd->add_option("--labeling", c.labeling, "Structural labels")->check(CLI::IsMember({"pl", "drnl"}));
  cmd->add_option("--backbone", c.backbone, "Semantic GNN")->check(CLI::IsMember({"sage", "gcn"}));
  cmd->add_option("--variant", c.variant, "Model variant")->check(CLI::IsMember({"seg", "seg-se", "seg-gnn", "mlp"}));
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

void add_train_flags(CLI::App* cmd, ConfigFlags& c) {
  cmd->add_option("--epochs", c.epochs, "Training epochs");
  cmd->add_option("--lr", c.lr, "Adam learning rate");
  cmd->add_option("--batch-size", c.batch_size, "Pairs per optimizer step");
  cmd->add_option("--pos-fraction", c.pos_fraction, "Share of training positives drawn per epoch");
  cmd->add_option("--neg-ratio", c.neg_ratio, "Negatives per positive");
  cmd->add_flag("--train-on-valid", c.train_on_valid, "Also train on validation positives");
  cmd->add_option("--hits", c.hits_k, "K values for Hits@K");
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    const json model = SegConfig{}, train = TrainConfig{};
    for (auto& [key, v] : model.items()) k.insert(key);
    for (auto& [key, v] : train.items()) k.insert(key);
    return k;
  }();
  return keys;
}

struct RunConfig {
  SegConfig model;
  TrainConfig train;

  // Flat, fully resolved echo of every setting.
  json echo() const {
    json j = json(model);
    j.update(json(train));
    return j;
  }
};

RunConfig resolve(const ConfigFlags& f) {
  json j = json::object();
  if (!f.config_file.empty()) {
    j = read_json_file(f.config_file);
    if (!j.is_object()) throw FormatError(f.config_file + ": config must be a JSON object");
    for (auto& [key, v] : j.items()) {
      if (!known_config_keys().contains(key)) throw FormatError(f.config_file + ": unknown config key '" + key + "'");
    }
  }
  auto set = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("lambda", f.lambda);
  set("hops", f.hops);
  set("labeling", f.labeling);
  set("backbone", f.backbone);
  set("variant", f.variant);
  set("epochs", f.epochs);
  set("batch_size", f.batch_size);
  set("threads", f.threads);
  set("lr", f.lr);
  set("pos_fraction", f.pos_fraction);
  set("neg_ratio", f.neg_ratio);
  set("seed", f.seed);
  if (!f.hits_k.empty()) j["hits_k"] = f.hits_k;
  if (f.train_on_valid) j["train_on_valid"] = true;

  RunConfig rc;
  rc.model = j.get<SegConfig>();
  rc.train = j.get<TrainConfig>();
  rc.model.validate();
  rc.train.validate();
  return rc;
}

json file_header(const char* format, const json& config) {
  return json{{"format", format}, {"version", kOutputVersion}, {"config", config}};
}

// ---------------------------------------------------------------- paths / label

struct PairFlags {
  std::vector<NodeId> pair;
};

void add_pair_flag(CLI::App* cmd, PairFlags& p, bool required) {
  auto* o = cmd->add_option("--pair", p.pair, "Target pair i j")->expected(2);
  if (required) o->required();
}

int cmd_paths(const GraphFlags& gf, const PairFlags& pf, unsigned hops, int max_len, std::size_t limit,
              const std::string& out_path) {
  const Graph g = load_graph(gf);
  if (max_len < 1) throw InvalidInputError("--lambda must be >= 1");
  const auto sub = extract_enclosing_subgraph(g, pf.pair[0], pf.pair[1], hops);
  std::vector<std::vector<NodeId>> paths;
  for (const auto& p : enumerate_simple_paths(sub, static_cast<unsigned>(max_len), limit).paths) {
    std::vector<NodeId> q;
    for (NodeId u : p) q.push_back(sub.local_to_global[u]);
    paths.push_back(std::move(q));
  }
  std::sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  Sink sink(out_path, file_header("seg-paths", {{"graph", gf.graph}, {"pair", pf.pair}, {"hops", hops},
                                                {"max_len", max_len}, {"path_limit", limit}}));
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.size(); ++k) sink.out() << (k ? " " : "") << p[k];
    sink.out() << '\n';
  }
  return 0;
}

int cmd_label(const GraphFlags& gf, const PairFlags& pf, const RunConfig& rc, const std::string& out_path) {
  const Graph g = load_graph(gf);
  const SegModel model(rc.model, g.feature_dim());
  const auto sub = model.extract(g, pf.pair[0], pf.pair[1]);
  const LabelAssignment la = model.structural_labels(sub);
  Sink sink(out_path, file_header("seg-labels", {{"graph", gf.graph},
                                                 {"pair", pf.pair},
                                                 {"hops", rc.model.hops},
                                                 {"lambda", rc.model.lambda},
                                                 {"labeling", to_string(rc.model.labeling)}}));
  for (NodeId u = 0; u < sub.size(); ++u) sink.out() << sub.local_to_global[u] << ' ' << la.labels[u] << '\n';
  return 0;
}

// ---------------------------------------------------------------- score

int cmd_score(const GraphFlags& gf, const std::string& pairs_path, const std::string& method, double alpha,
              unsigned katz_len, const std::string& out_path) {
  const Graph g = load_graph(gf);
  const Heuristic h = parse_heuristic(method);
  const KatzParams kp{alpha, katz_len};
  const auto pairs = read_pairs_file(pairs_path);
  json cfg{{"graph", gf.graph}, {"pairs", pairs_path}, {"method", method}};
  if (h == Heuristic::Katz) cfg.update({{"alpha", alpha}, {"max_len", katz_len}});
  Sink sink(out_path, file_header("seg-scores", cfg));
  for (auto [i, j] : pairs) sink.out() << i << ' ' << j << ' ' << num(heuristic_score(g, i, j, h, kp)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- train

json summarize(const std::vector<EvalReport>& reports) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : reports) {
    for (auto [k, v] : r.hits) values["hits@" + std::to_string(k)].push_back(v);
    if (r.mrr) values["mrr"].push_back(*r.mrr);
    values["auc"].push_back(r.auc);
  }
  json out = json::object();
  for (const auto& [name, xs] : values) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
    out[name] = {{"mean", mean}, {"std", sd}, {"runs", xs}};
  }
  return out;
}

std::string repeat_path(const std::string& path, std::size_t r, std::size_t repeats) {
  if (repeats == 1) return path;
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + ".r" + std::to_string(r) + p.extension().string())).string();
}

int cmd_train(const GraphFlags& gf, const std::string& splits_dir, const RunConfig& base, std::size_t repeats,
              const std::string& ckpt_path, std::string loss_path, const std::string& report_path) {
  if (repeats == 0) throw InvalidInputError("--repeats must be >= 1");
  const Graph g = load_graph(gf);
  const SplitDataset splits = read_splits(splits_dir);
  if (loss_path.empty()) loss_path = ckpt_path + ".loss.csv";
  std::vector<EvalReport> reports;
  json runs = json::array();
  for (std::size_t r = 0; r < repeats; ++r) {
    RunConfig rc = base;
    rc.train.seed = base.train.seed + r;
    json echo = rc.echo();
    echo["graph"] = gf.graph;
    echo["features"] = gf.features;
    echo["splits"] = splits_dir;
    const SegModel model(rc.model, g.feature_dim());
    if (repeats > 1) std::cout << "run " << r + 1 << "/" << repeats << " seed " << rc.train.seed << '\n';
    const TrainResult res = train(model, g, splits, rc.train, [](std::size_t e, double l) {
      std::cout << "epoch " << e << " loss " << num(l) << '\n' << std::flush;
    });

    std::ofstream ck = open_out(repeat_path(ckpt_path, r + 1, repeats));
    nn::save_checkpoint(ck, res.params, echo);
    std::ofstream csv = open_out(repeat_path(loss_path, r + 1, repeats));
    csv << "# " << file_header("seg-loss", echo).dump() << '\n' << "epoch,loss\n";
    for (std::size_t e = 0; e < res.loss_curve.size(); ++e) csv << e + 1 << ',' << num(res.loss_curve[e]) << '\n';

    if (!report_path.empty()) {
      const EvalReport rep = evaluate(model, res.params, g, splits, Split::Test, rc.train.hits_k, rc.train.threads);
      std::cout << rep.table();
      runs.push_back({{"seed", rc.train.seed}, {"report", rep}});
      reports.push_back(rep);
    }
  }
  if (!report_path.empty()) {
    json echo = base.echo();
    echo["repeats"] = repeats;
    json doc = file_header("seg-train-report", echo);
    doc["split"] = "test";
    doc["runs"] = runs;
    doc["summary"] = summarize(reports);
    open_out(report_path) << doc.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- eval / predict

struct Loaded {
  SegModel model;
  nn::ParamStore params;
  json config;
};

Loaded load_model(const std::string& path, std::size_t feature_dim) {
  std::ifstream in = open_in(path);
  nn::Checkpoint ck = nn::load_checkpoint(in);
  SegModel model(ck.config.get<SegConfig>(), feature_dim);
  model.check_params(ck.params);
  return {std::move(model), std::move(ck.params), std::move(ck.config)};
}

int cmd_eval(const GraphFlags& gf, const std::string& splits_dir, const std::string& ckpt_path,
             const std::string& method, const std::string& split_name, const std::vector<std::size_t>& ks,
             std::size_t threads, const std::string& out_path) {
  if (ckpt_path.empty() == method.empty()) throw InvalidInputError("give exactly one of --checkpoint or --method");
  const Graph g = load_graph(gf);
  const SplitDataset splits = read_splits(splits_dir);
  const Split which = split_name == "valid" ? Split::Valid : Split::Test;
  json echo;
  EvalReport rep;
  if (!method.empty()) {
    const Heuristic h = parse_heuristic(method);
    const std::vector<std::size_t> k = ks.empty() ? TrainConfig{}.hits_k : ks;
    echo = {{"method", method}, {"hits_k", k}};
    rep = evaluate([&](NodeId u, NodeId v) { return heuristic_score(g, u, v, h); }, splits, which, k, threads);
  } else {
    const Loaded m = load_model(ckpt_path, g.feature_dim());
    const std::vector<std::size_t> k = ks.empty() ? m.config.get<TrainConfig>().hits_k : ks;
    echo = m.config;
    echo["checkpoint"] = ckpt_path;
    echo["hits_k"] = k;
    rep = evaluate(m.model, m.params, g, splits, which, k, threads);
  }
  echo["graph"] = gf.graph;
  echo["splits"] = splits_dir;
  echo["split"] = split_name;
  std::cout << rep.table();
  if (!out_path.empty()) {
    json doc = file_header("seg-eval-report", echo);
    doc["report"] = rep;
    open_out(out_path) << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_predict(const GraphFlags& gf, const std::string& ckpt_path, const PairFlags& pf,
                const std::string& pairs_path, std::size_t threads, const std::string& out_path) {
  if (pf.pair.empty() == pairs_path.empty()) throw InvalidInputError("give exactly one of --pair or --pairs");
  const Graph g = load_graph(gf);
  const Loaded m = load_model(ckpt_path, g.feature_dim());
  const std::vector<Edge> pairs =
      pairs_path.empty() ? std::vector<Edge>{{pf.pair[0], pf.pair[1]}} : read_pairs_file(pairs_path);
  std::vector<SegOutput> outs(pairs.size());
  parallel_for(pairs.size(), resolve_threads(threads), [&](std::size_t k) {
    outs[k] = m.model.predict_link(g, pairs[k].first, pairs[k].second, m.params);
  });
  json echo = m.config;
  echo["checkpoint"] = ckpt_path;
  echo["graph"] = gf.graph;
  Sink sink(out_path, file_header("seg-predictions", echo));
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); };
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    sink.out() << pairs[k].first << ' ' << pairs[k].second << ' ' << num(outs[k].s) << ' '
               << opt(outs[k].s_semantic) << ' ' << opt(outs[k].s_structure) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(const GraphFlags& gf, const PairFlags& pf, const RunConfig& rc, double tolerance, double step) {
  Graph g;
  std::mt19937_64 rng(rc.train.seed);
  if (gf.graph.empty()) {
    // Seven-node default: two targets joined by paths of 2, 3 and 4 edges.
    const std::vector<Edge> e{{0, 2}, {2, 1}, {0, 3}, {3, 4}, {4, 1}, {0, 5}, {5, 3}, {0, 6}};
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(7 * 4);
    for (double& v : x) v = normal(rng);
    g = Graph::from_edges(7, e, std::move(x), 4);
  } else {
    g = load_graph(gf);
  }
  const NodeId i = pf.pair.empty() ? 0 : pf.pair[0];
  const NodeId j = pf.pair.empty() ? 1 : pf.pair[1];
  const SegModel model(rc.model, g.feature_dim());
  nn::ParamStore params = model.init_params(rc.train.seed);
  // Zero biases put ReLU inputs exactly on the kink, where central
  // differences are meaningless; move them off it.
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& p : params) {
    if (!p.name.ends_with(".bias")) continue;
    for (std::size_t k = 0; k < p.value.size(); ++k) p.value[k] = u(rng);
  }
  const auto sub = model.extract(g, i, j);
  const auto rep = nn::finite_diff_check(
      [&](nn::Tape& t) {
        const double y = 1.0;
        return nn::bce(model.forward(t, sub).probability, std::span<const double>(&y, 1));
      },
      params, {step, tolerance, nn::GradCheckOptions{}.denom_floor});
  json out{{"subgraph_nodes", sub.size()},       {"entries_checked", rep.entries_checked},
           {"max_rel_error", rep.max_rel_error}, {"worst_param", rep.worst_param},
           {"worst_index", rep.worst_index},     {"analytic", rep.worst_analytic},
           {"numeric", rep.worst_numeric},       {"tolerance", tolerance},
           {"passed", rep.passed},               {"config", rc.echo()}};
  std::cout << out.dump(2) << '\n';
  return rep.passed ? 0 : 3;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const std::string& dir, const std::string& config_file, SynthOptions opt,
              const std::map<std::string, json>& overrides) {
  json j = json(opt);
  if (!config_file.empty()) j.update(read_json_file(config_file));
  for (const auto& [k, v] : overrides) j[k] = v;
  try {
    opt = j.get<SynthOptions>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("synthetic config: ") + e.what());
  }
  const SyntheticBenchmark b = generate_synthetic_benchmark(opt);
  const json header = file_header("seg-synthetic", json(opt));
  fs::create_directories(dir);
  {
    std::ofstream out = open_out((fs::path(dir) / "graph.txt").string());
    out << "# " << header.dump() << '\n';
    write_edge_list(out, b.graph);
  }
  if (b.graph.has_features()) {
    std::ofstream out = open_out((fs::path(dir) / "features.txt").string());
    out << "# " << header.dump() << '\n';
    write_features(out, b.graph);
  }
  write_splits(dir, b.splits, header);
  std::cout << "nodes " << b.graph.num_nodes() << " edges " << b.graph.num_edges() << " valid "
            << b.splits.valid_pos.size() << " test " << b.splits.test_pos.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SEG: link prediction with structure-enhanced subgraph encoders"};
  app.require_subcommand(1);

  GraphFlags gf;
  PairFlags pf;
  ConfigFlags cf;
  std::string out, pairs_path, splits_dir, checkpoint, method, loss_csv, report, split_name = "test";
  std::string synth_config;
  unsigned hops = 1;
  int max_len = 4;
  std::size_t path_limit = kDefaultPathLimit, repeats = 1, threads = 0;
  double alpha = KatzParams{}.alpha, tolerance = 1e-4, step = 1e-5;
  unsigned katz_len = KatzParams{}.max_len;
  std::vector<std::size_t> eval_ks;

  auto* paths = app.add_subcommand("paths", "List simple paths between a pair inside its enclosing subgraph");
  add_graph_flags(paths, gf);
  add_pair_flag(paths, pf, true);
  paths->add_option("--k", hops, "Enclosing subgraph hops")->capture_default_str();
  paths->add_option("--lambda", max_len, "Longest path, in edges")->capture_default_str();
  paths->add_option("--path-limit", path_limit, "Abort above this many paths (0 = no cap)")->capture_default_str();
  paths->add_option("--out", out, "Write here instead of stdout");

  auto* label = app.add_subcommand("label", "Structural labels of a pair's enclosing subgraph");
  add_graph_flags(label, gf);
  add_pair_flag(label, pf, true);
  add_model_flags(label, cf);
  label->add_option("--out", out, "Write here instead of stdout");

  auto* score = app.add_subcommand("score", "Heuristic scores for a list of pairs");
  add_graph_flags(score, gf);
  score->add_option("--pairs", pairs_path, "File of 'i j' pairs")->required()->check(CLI::ExistingFile);
  score->add_option("--method", method, "Heuristic")->required()->check(CLI::IsMember({"cn", "jaccard", "aa", "katz"}));
  score->add_option("--alpha", alpha, "Katz damping")->capture_default_str();
  score->add_option("--max-len", katz_len, "Longest Katz walk")->capture_default_str();
  score->add_option("--out", out, "Write here instead of stdout");

  auto* trn = app.add_subcommand("train", "Train a model on a split directory");
  add_graph_flags(trn, gf);
  trn->add_option("--splits", splits_dir, "Split directory")->required()->check(CLI::ExistingDirectory);
  add_model_flags(trn, cf);
  add_train_flags(trn, cf);
  trn->add_option("--repeats", repeats, "Independent runs with seeds seed, seed+1, ...")->capture_default_str();
  trn->add_option("--checkpoint,--out", checkpoint, "Checkpoint to write")->required();
  trn->add_option("--loss-csv", loss_csv, "Loss curve CSV (default: <checkpoint>.loss.csv)");
  trn->add_option("--report", report, "Evaluate on the test split and write a JSON report");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint or a heuristic on a split");
  add_graph_flags(ev, gf);
  ev->add_option("--splits", splits_dir, "Split directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--checkpoint", checkpoint, "Trained model")->check(CLI::ExistingFile);
  ev->add_option("--method", method, "Heuristic instead of a model")->check(CLI::IsMember({"cn", "jaccard", "aa", "katz"}));
  ev->add_option("--split", split_name, "valid or test")->check(CLI::IsMember({"valid", "test"}))->capture_default_str();
  ev->add_option("--hits", eval_ks, "K values for Hits@K");
  ev->add_option("--threads", threads, "Worker threads (0 = all cores)");
  ev->add_option("--out", out, "Write the JSON report here");

  auto* pred = app.add_subcommand("predict", "Score pairs with a trained model");
  add_graph_flags(pred, gf);
  pred->add_option("--checkpoint", checkpoint, "Trained model")->required()->check(CLI::ExistingFile);
  add_pair_flag(pred, pf, false);
  pred->add_option("--pairs", pairs_path, "File of 'i j' pairs")->check(CLI::ExistingFile);
  pred->add_option("--threads", threads, "Worker threads (0 = all cores)");
  pred->add_option("--out", out, "Write here instead of stdout");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the full model gradient");
  add_graph_flags(gc, gf, false);
  add_pair_flag(gc, pf, false);
  add_model_flags(gc, cf);
  gc->add_option("--tolerance", tolerance, "Largest accepted relative error")->capture_default_str();
  gc->add_option("--step", step, "Central-difference step")->capture_default_str();

  SynthOptions so;
  std::map<std::string, json> synth_overrides;
  std::optional<std::size_t> s_nodes, s_epn, s_dim, s_pool, s_rank;
  std::optional<double> s_triad, s_valid, s_test;
  std::optional<std::uint64_t> s_seed;
  auto* syn = app.add_subcommand("synth", "Generate the synthetic triadic-closure benchmark");
  syn->add_option("--out", out, "Output directory")->required();
  syn->add_option("--config", synth_config, "JSON generator options; flags take precedence")->check(CLI::ExistingFile);
  syn->add_option("--nodes", s_nodes, "Number of nodes");
  syn->add_option("--edges-per-node", s_epn, "Edges added per arriving node");
  syn->add_option("--triad-prob", s_triad, "Triad formation probability");
  syn->add_option("--feature-dim", s_dim, "Noise feature width (0 = none)");
  syn->add_option("--valid-fraction", s_valid, "Share of edges held out for validation");
  syn->add_option("--test-fraction", s_test, "Share of edges held out for test");
  syn->add_option("--pool-negatives", s_pool, "Shared negative pool size");
  syn->add_option("--rank-negatives", s_rank, "Negatives per ranking query");
  syn->add_option("--seed", s_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (paths->parsed()) return cmd_paths(gf, pf, hops, max_len, path_limit, out);
    if (label->parsed()) return cmd_label(gf, pf, resolve(cf), out);
    if (score->parsed()) return cmd_score(gf, pairs_path, method, alpha, katz_len, out);
    if (trn->parsed()) return cmd_train(gf, splits_dir, resolve(cf), repeats, checkpoint, loss_csv, report);
    if (ev->parsed()) return cmd_eval(gf, splits_dir, checkpoint, method, split_name, eval_ks, threads, out);
    if (pred->parsed()) return cmd_predict(gf, checkpoint, pf, pairs_path, threads, out);
    if (gc->parsed()) return cmd_gradcheck(gf, pf, resolve(cf), tolerance, step);
    if (syn->parsed()) {
      auto put = [&](const char* key, const auto& v) {
        if (v) synth_overrides[key] = *v;
      };
      put("num_nodes", s_nodes);
      put("edges_per_node", s_epn);
      put("triad_prob", s_triad);
      put("feature_dim", s_dim);
      put("valid_fraction", s_valid);
      put("test_fraction", s_test);
      put("pool_negatives", s_pool);
      put("rank_negatives", s_rank);
      put("seed", s_seed);
      return cmd_synth(out, synth_config, so, synth_overrides);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
