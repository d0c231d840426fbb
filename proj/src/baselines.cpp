#include "mpb/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mpb/revenue.hpp"

namespace mpb {

std::string_view to_string(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::single_purchase: return "single_purchase";
    case BaselineKind::keep_viewing: return "keep_viewing";
    case BaselineKind::explore_exploit_a: return "explore_exploit_a";
    case BaselineKind::explore_exploit_b: return "explore_exploit_b";
  }
  return "unknown";
}

double BaselineConfig::exploration_threshold() const {
  return delta * std::log(static_cast<double>(horizon));
}

void BaselineConfig::validate() const {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (explores() && !(delta > 0.0)) throw ValidationError("delta must be positive");
}

RankingPolicy single_purchase_policy(const OptimisticEstimates& estimates,
                                     const ProductCatalog& catalog) {
  return optimal_ranking(estimates.lambda, estimates.q, 0.0, catalog);
}

double keep_viewing_score(double lambda, double revenue, double q) {
  const double den = 1.0 - q - (1.0 - q) * lambda;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return (lambda * revenue) / den;
}

RankingPolicy keep_viewing_policy(const OptimisticEstimates& estimates,
                                  const ProductCatalog& catalog) {
  const std::size_t n = catalog.size();
  if (estimates.lambda.size() != n) throw ValidationError("estimate/catalog size mismatch");
  std::vector<double> score(n), value(n);
  for (std::size_t k = 0; k < n; ++k) {
    score[k] = keep_viewing_score(estimates.lambda[k], catalog.revenue(k), estimates.q);
    value[k] = estimates.lambda[k] * catalog.revenue(k);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool inf_a = std::isinf(score[a]);
    const bool inf_b = std::isinf(score[b]);
    if (inf_a != inf_b) return inf_a;
    if (inf_a) return value[a] > value[b];
    return score[a] > score[b];
  });
  return RankingPolicy::from_zero_based(std::move(order));
}

RankingPolicy explore_then_exploit_policy(std::span<const std::int64_t> display_counts,
                                          const OptimisticEstimates& exploit,
                                          const ProductCatalog& catalog,
                                          const BaselineConfig& config) {
  config.validate();
  const std::size_t n = catalog.size();
  if (display_counts.size() != n || exploit.lambda.size() != n) {
    throw ValidationError("display counts/estimates/catalog size mismatch");
  }
  const double threshold = config.exploration_threshold();
  const auto under_explored = [&](std::size_t k) {
    return static_cast<double>(display_counts[k]) < threshold;
  };
  const bool exploring = std::any_of(display_counts.begin(), display_counts.end(),
                                     [&](std::int64_t c) { return static_cast<double>(c) < threshold; });
  if (!exploring) return optimal_ranking(exploit.lambda, exploit.q, exploit.s(), catalog);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto by_count = [&](std::size_t a, std::size_t b) {
    return display_counts[a] < display_counts[b];
  };
  if (config.kind == BaselineKind::explore_exploit_a) {
    std::stable_sort(order.begin(), order.end(), by_count);
    return RankingPolicy::from_zero_based(std::move(order));
  }
  if (config.kind != BaselineKind::explore_exploit_b) {
    throw ValidationError("explore-then-exploit ranking requested for a non-exploring baseline");
  }
  std::vector<double> scores(n);
  for (std::size_t k = 0; k < n; ++k) {
    scores[k] = theorem1_score(exploit.lambda[k], catalog.revenue(k), exploit.q, exploit.s());
  }
  auto split = std::stable_partition(order.begin(), order.end(), under_explored);
  std::stable_sort(order.begin(), split, by_count);
  std::stable_sort(split, order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return RankingPolicy::from_zero_based(std::move(order));
}

RankingPolicy explore_then_exploit_policy(const NonContextualStats& stats,
                                          const ProductCatalog& catalog,
                                          const BaselineConfig& config,
                                          const GlobalConfig& global) {
  return explore_then_exploit_policy(stats.views, greedy_estimates(stats, global), catalog, config);
}

}  // namespace mpb
