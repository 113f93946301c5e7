#include "seg/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include "seg/error.hpp"

namespace seg {

double hits_at_k(std::span<const double> positives, std::span<const double> negatives, std::size_t k) {
  if (positives.empty() || negatives.empty()) throw InvalidInputError("hits@K needs positives and negatives");
  if (k == 0) throw InvalidInputError("hits@K needs K >= 1");
  if (negatives.size() < k) return 1.0;
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::nth_element(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k - 1), neg.end(),
                   std::greater<>());
  const double threshold = neg[k - 1];
  const auto hits = std::count_if(positives.begin(), positives.end(),
                                  [&](double p) { return p > threshold; });
  return static_cast<double>(hits) / static_cast<double>(positives.size());
}

std::size_t pessimistic_rank(const CandidateSet& c) {
  return 1 + static_cast<std::size_t>(std::count_if(c.negatives.begin(), c.negatives.end(),
                                                    [&](double n) { return n >= c.positive; }));
}

double mean_reciprocal_rank(std::span<const CandidateSet> sets) {
  if (sets.empty()) throw InvalidInputError("MRR over no candidate sets");
  double total = 0.0;
  for (const auto& c : sets) {
    if (c.negatives.empty()) throw InvalidInputError("MRR candidate set without negatives");
    total += 1.0 / static_cast<double>(pessimistic_rank(c));
  }
  return total / static_cast<double>(sets.size());
}

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw InvalidInputError("AUC needs positives and negatives");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : positives) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(positives.size()) * static_cast<double>(neg.size()));
}

EvalReport make_report(std::vector<double> positives, std::vector<double> negatives,
                       std::span<const std::size_t> ks, std::span<const CandidateSet> ranked) {
  EvalReport r;
  for (std::size_t k : ks) r.hits[k] = hits_at_k(positives, negatives, k);
  r.auc = roc_auc(positives, negatives);
  if (!ranked.empty()) r.mrr = mean_reciprocal_rank(ranked);
  r.positive_scores = std::move(positives);
  r.negative_scores = std::move(negatives);
  return r;
}

std::string EvalReport::table() const {
  std::string out = "metric      value\n";
  char buf[64];
  for (const auto& [k, v] : hits) {
    std::snprintf(buf, sizeof(buf), "hits@%-6zu %.4f\n", k, v);
    out += buf;
  }
  if (mrr) {
    std::snprintf(buf, sizeof(buf), "mrr         %.4f\n", *mrr);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "auc         %.4f\n", auc);
  out += buf;
  return out;
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : r.hits) hits[std::to_string(k)] = v;
  j = nlohmann::json{{"hits", hits},
                     {"auc", r.auc},
                     {"mrr", r.mrr ? nlohmann::json(*r.mrr) : nlohmann::json()},
                     {"positive_scores", r.positive_scores},
                     {"negative_scores", r.negative_scores}};
}

}  // namespace seg
