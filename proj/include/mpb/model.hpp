#pragma once

// Shared domain vocabulary: products, consumer parameters, rankings and the
// observable trace of one browsing session.
//
// Storage is 0-based throughout the library. Anything that crosses an
// external boundary (CLI output, JSON files, make_policy) uses 1-based
// product indices.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpb {

/// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultEpsilonQ = 0.05;

class ProductCatalog {
public:
  explicit ProductCatalog(std::vector<double> revenues);

  std::size_t size() const noexcept { return revenues_.size(); }
  double revenue(std::size_t product) const { return revenues_.at(product); }
  std::span<const double> revenues() const noexcept { return revenues_; }
  double max_revenue() const noexcept;

private:
  std::vector<double> revenues_;
};

/// Purchase probabilities plus the attention (q) and budget (s) continuation
/// parameters of one consumer. Rejects q > 1 - epsilon_q.
class ConsumerProfile {
public:
  ConsumerProfile(std::vector<double> lambdas, double q, double s,
                  double epsilon_q = kDefaultEpsilonQ);

  std::size_t size() const noexcept { return lambdas_.size(); }
  double lambda(std::size_t product) const { return lambdas_.at(product); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  double q() const noexcept { return q_; }
  double s() const noexcept { return s_; }
  /// Probability of continuing to browse right after a purchase.
  double w() const noexcept { return q_ * s_; }

private:
  std::vector<double> lambdas_;
  double q_;
  double s_;
};

/// A permutation of products: product_at(k) is shown at display position k.
class RankingPolicy {
public:
  /// Validates a 0-based permutation.
  static RankingPolicy from_zero_based(std::vector<std::size_t> order);
  static RankingPolicy identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t product_at(std::size_t position) const { return order_.at(position); }
  std::size_t position_of(std::size_t product) const { return inverse_.at(product); }
  std::span<const std::size_t> order() const noexcept { return order_; }
  std::span<const std::size_t> inverse() const noexcept { return inverse_; }

  std::vector<std::size_t> one_based_order() const;
  std::vector<std::size_t> one_based_inverse() const;

  friend bool operator==(const RankingPolicy&, const RankingPolicy&) = default;

private:
  RankingPolicy(std::vector<std::size_t> order, std::vector<std::size_t> inverse)
      : order_(std::move(order)), inverse_(std::move(inverse)) {}

  std::vector<std::size_t> order_;
  std::vector<std::size_t> inverse_;
};

/// Builds a policy from 1-based product indices, e.g. {3, 1, 2}.
RankingPolicy make_policy(std::span<const std::size_t> one_based_order);

/// Observed browse trace. Position k (0-based) carries the purchase flag and,
/// when observed, the continuation decision taken right after it: eta for a
/// skipped product, mu for a purchased one.
class SessionOutcome {
public:
  SessionOutcome(std::vector<bool> purchases, std::vector<std::optional<bool>> continuations);

  std::size_t viewed() const noexcept { return purchases_.size(); }
  bool purchased(std::size_t position) const { return purchases_.at(position); }
  std::optional<bool> continuation(std::size_t position) const {
    return continuations_.at(position);
  }
  std::optional<bool> eta(std::size_t position) const;
  std::optional<bool> mu(std::size_t position) const;
  std::size_t purchase_count() const noexcept;

  const std::vector<bool>& purchases() const noexcept { return purchases_; }
  const std::vector<std::optional<bool>>& continuations() const noexcept {
    return continuations_;
  }

private:
  std::vector<bool> purchases_;
  std::vector<std::optional<bool>> continuations_;
};

struct GlobalConfig {
  double epsilon_q = kDefaultEpsilonQ;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

}  // namespace mpb
