#include "mpb/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpb {

ProductCatalog::ProductCatalog(std::vector<double> revenues) : revenues_(std::move(revenues)) {
  if (revenues_.empty()) throw ValidationError("catalog must contain at least one product");
  for (std::size_t k = 0; k < revenues_.size(); ++k) {
    if (!std::isfinite(revenues_[k]) || revenues_[k] < 0.0) {
      throw ValidationError("revenue of product " + std::to_string(k + 1) +
                            " must be finite and non-negative");
    }
  }
}

double ProductCatalog::max_revenue() const noexcept {
  return *std::max_element(revenues_.begin(), revenues_.end());
}

ConsumerProfile::ConsumerProfile(std::vector<double> lambdas, double q, double s, double epsilon_q)
    : lambdas_(std::move(lambdas)), q_(q), s_(s) {
  if (!(epsilon_q > 0.0 && epsilon_q < 1.0)) throw ValidationError("epsilon_q must lie in (0, 1)");
  if (lambdas_.empty()) throw ValidationError("profile must cover at least one product");
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    if (!(lambdas_[k] >= 0.0 && lambdas_[k] <= 1.0)) {
      throw ValidationError("lambda of product " + std::to_string(k + 1) + " outside [0, 1]");
    }
  }
  if (!(q_ >= 0.0 && q_ <= 1.0 - epsilon_q)) {
    throw ValidationError("q = " + std::to_string(q_) + " outside [0, 1 - epsilon_q]");
  }
  if (!(s_ >= 0.0 && s_ <= 1.0)) throw ValidationError("s outside [0, 1]");
}

RankingPolicy RankingPolicy::from_zero_based(std::vector<std::size_t> order) {
  if (order.empty()) throw ValidationError("ranking must contain at least one product");
  const std::size_t n = order.size();
  std::vector<std::size_t> inverse(n, n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t product = order[pos];
    if (product >= n) {
      throw ValidationError("product index " + std::to_string(product + 1) + " out of range 1.." +
                            std::to_string(n));
    }
    if (inverse[product] != n) {
      throw ValidationError("product index " + std::to_string(product + 1) + " appears twice");
    }
    inverse[product] = pos;
  }
  return RankingPolicy(std::move(order), std::move(inverse));
}

RankingPolicy RankingPolicy::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  return from_zero_based(std::move(order));
}

std::vector<std::size_t> RankingPolicy::one_based_order() const {
  std::vector<std::size_t> out(order_);
  for (auto& v : out) ++v;
  return out;
}

std::vector<std::size_t> RankingPolicy::one_based_inverse() const {
  std::vector<std::size_t> out(inverse_);
  for (auto& v : out) ++v;
  return out;
}

RankingPolicy make_policy(std::span<const std::size_t> one_based_order) {
  std::vector<std::size_t> order;
  order.reserve(one_based_order.size());
  for (std::size_t idx : one_based_order) {
    if (idx == 0) throw ValidationError("product indices are 1-based; got 0");
    order.push_back(idx - 1);
  }
  return RankingPolicy::from_zero_based(std::move(order));
}

SessionOutcome::SessionOutcome(std::vector<bool> purchases,
                               std::vector<std::optional<bool>> continuations)
    : purchases_(std::move(purchases)), continuations_(std::move(continuations)) {
  if (purchases_.empty()) throw ValidationError("a session views at least one product");
  if (continuations_.size() != purchases_.size()) {
    throw ValidationError("continuation record length must equal the number of viewed products");
  }
  // Every position before the last was necessarily followed by another view.
  for (std::size_t k = 0; k + 1 < purchases_.size(); ++k) {
    if (continuations_[k] != std::optional<bool>(true)) {
      throw ValidationError("session continued past position " + std::to_string(k + 1) +
                            " without a recorded continuation");
    }
  }
}

std::optional<bool> SessionOutcome::eta(std::size_t position) const {
  if (purchases_.at(position)) return std::nullopt;
  return continuations_[position];
}

std::optional<bool> SessionOutcome::mu(std::size_t position) const {
  if (!purchases_.at(position)) return std::nullopt;
  return continuations_[position];
}

std::size_t SessionOutcome::purchase_count() const noexcept {
  return static_cast<std::size_t>(std::count(purchases_.begin(), purchases_.end(), true));
}

void GlobalConfig::validate() const {
  if (!(epsilon_q > 0.0 && epsilon_q < 1.0)) throw ValidationError("epsilon_q must lie in (0, 1)");
}

}  // namespace mpb
