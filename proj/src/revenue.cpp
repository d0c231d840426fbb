#include "mpb/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpb/kernels.hpp"

namespace mpb {
namespace {

void check_dimensions(const ConsumerProfile& profile, const RankingPolicy& policy) {
  if (profile.size() != policy.size()) {
    throw ValidationError("profile covers " + std::to_string(profile.size()) +
                          " products but the ranking has " + std::to_string(policy.size()));
  }
}

void check_dimensions(const ConsumerProfile& profile, const RankingPolicy& policy,
                      const ProductCatalog& catalog) {
  check_dimensions(profile, policy);
  if (catalog.size() != profile.size()) {
    throw ValidationError("catalog has " + std::to_string(catalog.size()) +
                          " products but the profile covers " + std::to_string(profile.size()));
  }
}

// P(X = k) for k < cap and P(X >= cap) at k = cap, X ~ Geo(1 - p) on {1, 2, ...}.
std::vector<double> folded_geometric(double p, std::size_t cap) {
  std::vector<double> mass(cap + 1, 0.0);
  double pk = 1.0;  // p^(k-1)
  for (std::size_t k = 1; k <= cap; ++k) {
    mass[k] = (k < cap) ? pk * (1.0 - p) : pk;
    pk *= p;
  }
  return mass;
}

}  // namespace

PurchaseCountTable::PurchaseCountTable(const ConsumerProfile& profile, const RankingPolicy& policy)
    : n_(profile.size()) {
  check_dimensions(profile, policy);
  data_.resize(n_ * (n_ + 1) / 2);
  data_[0] = 1.0;
  std::size_t offset = 0;
  for (std::size_t k = 1; k < n_; ++k) {
    const std::size_t next_offset = offset + k;
    const double lam = profile.lambda(policy.product_at(k - 1));
    kernels::binomial_step(std::span<const double>(data_.data() + offset, k),
                           std::span<double>(data_.data() + next_offset, k + 1), lam);
    offset = next_offset;
  }
}

std::span<const double> PurchaseCountTable::prefix_row(std::size_t k) const {
  if (k >= n_) throw ValidationError("prefix length must be below N");
  const std::size_t offset = k * (k + 1) / 2;
  return {data_.data() + offset, k + 1};
}

double PurchaseCountTable::at(std::size_t k, std::size_t u) const {
  if (k < 1 || k > n_ || u >= k) throw ValidationError("table index out of range");
  return prefix_row(k - 1)[u];
}

PurchaseCountTable build_purchase_count_table(const ConsumerProfile& profile,
                                              const RankingPolicy& policy) {
  return PurchaseCountTable(profile, policy);
}

double purchase_set_probability(std::span<const std::size_t> positions, std::size_t v,
                                std::size_t b, const ConsumerProfile& profile,
                                const RankingPolicy& policy) {
  check_dimensions(profile, policy);
  if (v < 1 || v > policy.size()) throw ValidationError("attention span must lie in 1..N");
  if (b < 1) throw ValidationError("purchase budget must be at least 1");
  std::vector<bool> bought(v, false);
  std::size_t last = 0;
  for (std::size_t pos : positions) {
    if (pos >= v) {
      throw ValidationError("position " + std::to_string(pos + 1) + " beyond attention span " +
                            std::to_string(v));
    }
    if (bought[pos]) throw ValidationError("duplicate position in purchase set");
    bought[pos] = true;
    last = std::max(last, pos);
  }
  const std::size_t count = positions.size();
  if (count > b) return 0.0;
  // With the budget exhausted the consumer leaves right after the last purchase.
  const std::size_t horizon = (count == b) ? last + 1 : v;
  double prob = 1.0;
  for (std::size_t pos = 0; pos < horizon; ++pos) {
    const double lam = profile.lambda(policy.product_at(pos));
    prob *= bought[pos] ? lam : (1.0 - lam);
  }
  return prob;
}

double expected_revenue(const ConsumerProfile& profile, const RankingPolicy& policy,
                        const ProductCatalog& catalog) {
  check_dimensions(profile, policy, catalog);
  const std::size_t n = profile.size();
  const double q = profile.q();
  const double s = profile.s();

  std::vector<double> budget_survival(n);  // P(B >= u + 1) = s^u
  double sp = 1.0;
  for (std::size_t u = 0; u < n; ++u) {
    budget_survival[u] = sp;
    sp *= s;
  }

  std::vector<double> row(n + 1, 0.0), next(n + 1, 0.0);
  row[0] = 1.0;
  double view_survival = 1.0;  // P(V >= k + 1) = q^k
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t product = policy.product_at(k);
    const double lam = profile.lambda(product);
    const double reach =
        kernels::dot(std::span<const double>(budget_survival.data(), k + 1),
                     std::span<const double>(row.data(), k + 1));
    total += catalog.revenue(product) * lam * view_survival * reach;
    if (k + 1 < n) {
      kernels::binomial_step(std::span<const double>(row.data(), k + 1),
                             std::span<double>(next.data(), k + 2), lam);
      row.swap(next);
    }
    view_survival *= q;
  }
  return total;
}

double brute_force_revenue(const ConsumerProfile& profile, const RankingPolicy& policy,
                           const ProductCatalog& catalog) {
  check_dimensions(profile, policy, catalog);
  const std::size_t n = profile.size();
  if (n > kBruteForceMaxProducts) {
    throw ValidationError("brute-force enumeration limited to " +
                          std::to_string(kBruteForceMaxProducts) + " products, got " +
                          std::to_string(n));
  }
  // Spans beyond N see the same list as v = N; budgets beyond N never bind.
  const std::vector<double> p_view = folded_geometric(profile.q(), n);
  const std::vector<double> p_budget = folded_geometric(profile.s(), n);

  std::vector<std::size_t> positions;
  positions.reserve(n);
  double total = 0.0;
  for (std::size_t v = 1; v <= n; ++v) {
    if (p_view[v] == 0.0) continue;
    for (std::size_t b = 1; b <= n; ++b) {
      if (p_budget[b] == 0.0) continue;
      double inner = 0.0;
      for (std::uint32_t mask = 0; mask < (1u << v); ++mask) {
        positions.clear();
        double value = 0.0;
        for (std::size_t pos = 0; pos < v; ++pos) {
          if (mask & (1u << pos)) {
            positions.push_back(pos);
            value += catalog.revenue(policy.product_at(pos));
          }
        }
        if (positions.empty()) continue;
        inner += purchase_set_probability(positions, v, b, profile, policy) * value;
      }
      total += p_view[v] * p_budget[b] * inner;
    }
  }
  return total;
}

double theorem1_score(double lambda, double revenue, double q, double s) {
  return (lambda * revenue) / ((1.0 - q) + (q * (1.0 - s)) * lambda);
}

RankingPolicy rank_by_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return RankingPolicy::from_zero_based(std::move(order));
}

RankingPolicy optimal_ranking(std::span<const double> lambdas, double q, double s,
                              const ProductCatalog& catalog) {
  if (lambdas.size() != catalog.size()) throw ValidationError("lambda/catalog size mismatch");
  if (!(q >= 0.0 && q < 1.0)) throw ValidationError("q must lie in [0, 1)");
  std::vector<double> scores(lambdas.size());
  kernels::ranking_scores(lambdas, catalog.revenues(), scores, q, s);
  return rank_by_scores(scores);
}

RankingPolicy optimal_ranking(const ConsumerProfile& profile, const ProductCatalog& catalog) {
  return optimal_ranking(profile.lambdas(), profile.q(), profile.s(), catalog);
}

}  // namespace mpb
