#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace seg {

/// Share of positives scoring strictly above the K-th highest negative. With
/// fewer than K negatives every positive is a hit. Throws InvalidInputError
/// on empty inputs or K == 0.
double hits_at_k(std::span<const double> positives, std::span<const double> negatives, std::size_t k);

/// One positive against its own negatives.
struct CandidateSet {
  double positive = 0.0;
  std::vector<double> negatives;
};

/// rank = 1 + #{negatives >= positive}; ties count against the positive.
std::size_t pessimistic_rank(const CandidateSet& c);

/// Mean reciprocal rank. Throws InvalidInputError when empty or when a set
/// has no negatives.
double mean_reciprocal_rank(std::span<const CandidateSet> sets);

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

struct EvalReport {
  std::map<std::size_t, double> hits;
  std::optional<double> mrr;
  double auc = 0.0;
  std::vector<double> positive_scores;
  std::vector<double> negative_scores;

  /// Human-readable table.
  std::string table() const;
};

/// Builds a report from a shared negative pool plus optional per-source
/// candidate sets.
EvalReport make_report(std::vector<double> positives, std::vector<double> negatives,
                       std::span<const std::size_t> ks, std::span<const CandidateSet> ranked = {});

void to_json(nlohmann::json& j, const EvalReport& r);

}  // namespace seg
