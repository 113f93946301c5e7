#pragma once

#include <functional>
#include <span>
#include <vector>

#include "seg/config.hpp"
#include "seg/dataset.hpp"
#include "seg/metrics.hpp"
#include "seg/model.hpp"

namespace seg {

struct TrainResult {
  nn::ParamStore params;
  /// Mean per-sample loss of each epoch.
  std::vector<double> loss_curve;
};

/// Called after every epoch with (epoch starting at 1, mean loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/**
 * Mini-batch training with Adam. Each epoch draws pos_fraction of the
 * training positives (plus valid positives with train_on_valid), pairs them
 * with freshly sampled negatives, and runs forward/backward per pair; the
 * batch gradient is reduced in sample order so results do not depend on the
 * thread count. Throws NumericError on a non-finite loss.
 */
TrainResult train(const SegModel& model, const Graph& g, const SplitDataset& splits,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Same, starting from the given parameters.
TrainResult train(const SegModel& model, const Graph& g, const SplitDataset& splits,
                  const TrainConfig& cfg, nn::ParamStore init, const EpochCallback& on_epoch = {});

/// s for every pair, computed in parallel.
std::vector<double> score_pairs(const SegModel& model, const nn::ParamStore& params, const Graph& g,
                                std::span<const Edge> pairs, std::size_t threads = 0);

using PairScorer = std::function<double(NodeId, NodeId)>;

enum class Split { Valid, Test };

/// Hits@K over the split's shared negative pool, AUC over the same pool, and
/// MRR when the split has ranking queries. Throws InvalidInputError when the
/// split has no positives or no negative pool.
EvalReport evaluate(const PairScorer& scorer, const SplitDataset& splits, Split which,
                    std::span<const std::size_t> ks, std::size_t threads = 0);

EvalReport evaluate(const SegModel& model, const nn::ParamStore& params, const Graph& g,
                    const SplitDataset& splits, Split which, std::span<const std::size_t> ks,
                    std::size_t threads = 0);

}  // namespace seg
