#pragma once

// Comparison policies: rankings derived from the single-purchase and
// keep-viewing choice models, and two explore-then-exploit schemes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "mpb/model.hpp"
#include "mpb/noncontextual.hpp"

namespace mpb {

enum class BaselineKind { single_purchase, keep_viewing, explore_exploit_a, explore_exploit_b };

std::string_view to_string(BaselineKind kind) noexcept;

struct BaselineConfig {
  BaselineKind kind = BaselineKind::single_purchase;
  double delta = 1.0;         // exploration multiplier, explore-then-exploit only
  std::uint64_t horizon = 1;  // T

  bool explores() const noexcept {
    return kind == BaselineKind::explore_exploit_a || kind == BaselineKind::explore_exploit_b;
  }
  /// Displays each product needs before exploitation: delta * log T.
  double exploration_threshold() const;
  void validate() const;
};

/// Optimal-ranking score order with the budget continuation forced to zero.
RankingPolicy single_purchase_policy(const OptimisticEstimates& estimates,
                                     const ProductCatalog& catalog);

/// lambda*r / (1 - q - (1-q)*lambda); +infinity when the denominator is not
/// positive.
double keep_viewing_score(double lambda, double revenue, double q);

/// Descending keep_viewing_score. Products with an infinite score come first,
/// ordered by descending lambda*r, then by index.
RankingPolicy keep_viewing_policy(const OptimisticEstimates& estimates,
                                  const ProductCatalog& catalog);

/// While some product has fewer than delta*log T displays: variant A ranks
/// every product by ascending display count; variant B does so only for the
/// under-explored products and appends the rest in optimal-score order under
/// `exploit`. Afterwards both rank by optimal-score order under `exploit`.
RankingPolicy explore_then_exploit_policy(std::span<const std::int64_t> display_counts,
                                          const OptimisticEstimates& exploit,
                                          const ProductCatalog& catalog,
                                          const BaselineConfig& config);

/// Non-contextual convenience: display counts are the view counts and the
/// exploitation estimates are the point estimates.
RankingPolicy explore_then_exploit_policy(const NonContextualStats& stats,
                                          const ProductCatalog& catalog,
                                          const BaselineConfig& config,
                                          const GlobalConfig& global);

}  // namespace mpb
