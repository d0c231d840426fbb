#pragma once

// Exact expected revenue of a ranking under the multiple-purchase-with-budget
// choice model, and the revenue-maximizing ranking.

#include <cstddef>
#include <span>
#include <vector>

#include "mpb/model.hpp"

namespace mpb {

/// Distribution of the number of purchases among the first k display
/// positions, ignoring attention span and budget. prefix_row(k)[u] is the
/// probability of exactly u purchases among positions 1..k; the row for
/// k = 0 is {1}.
class PurchaseCountTable {
public:
  PurchaseCountTable(const ConsumerProfile& profile, const RankingPolicy& policy);

  std::size_t size() const noexcept { return n_; }
  std::span<const double> prefix_row(std::size_t k) const;
  /// 1-based accessor: probability of exactly u purchases among positions
  /// 1..k-1, for 1 <= k <= N and 0 <= u <= k-1.
  double at(std::size_t k, std::size_t u) const;

private:
  std::size_t n_;
  std::vector<double> data_;  // rows 0..n-1 packed, row k has k+1 entries
};

PurchaseCountTable build_purchase_count_table(const ConsumerProfile& profile,
                                              const RankingPolicy& policy);

/// Probability that, given attention span v and budget b, the consumer buys
/// exactly the products at the 0-based display positions in `positions`.
double purchase_set_probability(std::span<const std::size_t> positions, std::size_t v,
                                std::size_t b, const ConsumerProfile& profile,
                                const RankingPolicy& policy);

/// Closed-form expectation over both geometric draws. O(N^2).
double expected_revenue(const ConsumerProfile& profile, const RankingPolicy& policy,
                        const ProductCatalog& catalog);

inline constexpr std::size_t kBruteForceMaxProducts = 12;

/// Direct enumeration over (v, b, purchase set). Exponential; N <= 12.
double brute_force_revenue(const ConsumerProfile& profile, const RankingPolicy& policy,
                           const ProductCatalog& catalog);

double theorem1_score(double lambda, double revenue, double q, double s);

/// Ranking by descending theorem1_score over precomputed parameters; ties go to
/// the lower product index.
RankingPolicy rank_by_scores(std::span<const double> scores);

RankingPolicy optimal_ranking(std::span<const double> lambdas, double q, double s,
                              const ProductCatalog& catalog);
RankingPolicy optimal_ranking(const ConsumerProfile& profile, const ProductCatalog& catalog);

}  // namespace mpb
