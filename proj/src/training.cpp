#include "seg/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "seg/error.hpp"
#include "seg/nn/ops.hpp"
#include "seg/parallel.hpp"

namespace seg {

namespace {

struct Sample {
  Edge pair;
  double label;
};

struct SampleResult {
  double loss = 0.0;
  nn::Gradients grads;
};

SampleResult run_sample(const SegModel& model, const nn::ParamStore& params, const Graph& g,
                        const Sample& s) {
  const EnclosingSubgraph sub = model.extract(g, s.pair.first, s.pair.second);
  nn::Tape tape(&params);
  const SegForward f = model.forward(tape, sub);
  const double label = s.label;
  nn::Var loss = nn::bce(f.probability, std::span<const double>(&label, 1));
  SampleResult r;
  r.loss = loss.value()[0];
  r.grads = nn::grad(loss);
  return r;
}

}  // namespace

TrainResult train(const SegModel& model, const Graph& g, const SplitDataset& splits,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  return train(model, g, splits, cfg, model.init_params(cfg.seed), on_epoch);
}

TrainResult train(const SegModel& model, const Graph& g, const SplitDataset& splits,
                  const TrainConfig& cfg, nn::ParamStore init, const EpochCallback& on_epoch) {
  cfg.validate();
  splits.validate(g);
  model.check_params(init);

  std::vector<Edge> positives = splits.train_pos;
  if (cfg.train_on_valid) positives.insert(positives.end(), splits.valid_pos.begin(), splits.valid_pos.end());
  if (positives.empty()) throw InvalidInputError("no training positives");

  // No positive of any split may be drawn as a negative.
  const EdgeSet forbidden = splits.all_positives();
  const std::size_t threads = resolve_threads(cfg.threads);
  const nn::AdamOptions adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps};

  TrainResult result;
  result.params = std::move(init);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(positives.begin(), positives.end(), rng);
    const auto n_pos = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.pos_fraction * static_cast<double>(positives.size()))));
    const auto n_neg = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.neg_ratio * static_cast<double>(n_pos))));

    std::vector<Sample> samples;
    samples.reserve(n_pos + n_neg);
    for (std::size_t k = 0; k < n_pos; ++k) samples.push_back({positives[k], 1.0});
    for (const auto& e : sample_negatives(g, n_neg, rng, forbidden)) samples.push_back({e, 0.0});
    std::shuffle(samples.begin(), samples.end(), rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < samples.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(samples.size(), start + cfg.batch_size);
      const std::size_t b = end - start;
      std::vector<SampleResult> results(b);
      parallel_for(b, threads, [&](std::size_t k) {
        results[k] = run_sample(model, result.params, g, samples[start + k]);
      });

      nn::Gradients batch_grad = result.params.zero_gradients();
      double batch_loss = 0.0;
      for (const auto& r : results) {
        batch_loss += r.loss;
        nn::accumulate(batch_grad, r.grads, 1.0 / static_cast<double>(b));
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at sample " +
                           std::to_string(start));
      }
      epoch_loss += batch_loss;
      nn::adam_step(result.params, batch_grad, adam);
    }
    epoch_loss /= static_cast<double>(samples.size());
    result.loss_curve.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return result;
}

std::vector<double> score_pairs(const SegModel& model, const nn::ParamStore& params, const Graph& g,
                                std::span<const Edge> pairs, std::size_t threads) {
  std::vector<double> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    out[k] = model.score(g, pairs[k].first, pairs[k].second, params);
  });
  return out;
}

EvalReport evaluate(const PairScorer& scorer, const SplitDataset& splits, Split which,
                    std::span<const std::size_t> ks, std::size_t threads) {
  const auto& pos = which == Split::Valid ? splits.valid_pos : splits.test_pos;
  const auto& neg = which == Split::Valid ? splits.valid_neg : splits.test_neg;
  const auto& rank = which == Split::Valid ? splits.valid_rank : splits.test_rank;
  if (pos.empty()) throw InvalidInputError("evaluation split has no positives");
  if (neg.empty()) throw InvalidInputError("evaluation split has no negative pool");

  auto score_all = [&](std::span<const Edge> pairs) {
    std::vector<double> out(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) { out[k] = scorer(pairs[k].first, pairs[k].second); });
    return out;
  };

  std::vector<double> pos_scores = score_all(pos);
  std::vector<double> neg_scores = score_all(neg);

  std::vector<CandidateSet> sets;
  if (!rank.empty()) {
    std::vector<Edge> flat;
    for (const auto& q : rank) {
      flat.push_back(q.positive);
      for (NodeId w : q.negatives) flat.emplace_back(q.positive.first, w);
    }
    const std::vector<double> flat_scores = score_all(flat);
    std::size_t at = 0;
    for (const auto& q : rank) {
      CandidateSet c;
      c.positive = flat_scores[at++];
      c.negatives.assign(flat_scores.begin() + static_cast<std::ptrdiff_t>(at),
                         flat_scores.begin() + static_cast<std::ptrdiff_t>(at + q.negatives.size()));
      at += q.negatives.size();
      sets.push_back(std::move(c));
    }
  }
  return make_report(std::move(pos_scores), std::move(neg_scores), ks, sets);
}

EvalReport evaluate(const SegModel& model, const nn::ParamStore& params, const Graph& g,
                    const SplitDataset& splits, Split which, std::span<const std::size_t> ks,
                    std::size_t threads) {
  model.check_params(params);
  return evaluate([&](NodeId u, NodeId v) { return model.score(g, u, v, params); }, splits, which, ks,
                  threads);
}

}  // namespace seg
