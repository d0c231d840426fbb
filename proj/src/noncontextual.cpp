#include "mpb/noncontextual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpb/revenue.hpp"

namespace mpb {
namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

double radius(double xi, std::uint64_t t, std::int64_t n) {
  return xi * std::sqrt(std::log(static_cast<double>(t)) / static_cast<double>(n));
}

}  // namespace

void ExplorationWeights::validate() const {
  if (!(xi_lambda >= 0.0 && xi_q >= 0.0 && xi_w >= 0.0)) {
    throw ValidationError("exploration weights must be non-negative");
  }
}

void update_stats(NonContextualStats& stats, const SessionOutcome& outcome,
                  const RankingPolicy& policy) {
  if (stats.size() != policy.size()) throw ValidationError("statistics/ranking size mismatch");
  if (outcome.viewed() > policy.size()) {
    throw ValidationError("session viewed " + std::to_string(outcome.viewed()) +
                          " products from a list of " + std::to_string(policy.size()));
  }
  for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) {
    const std::size_t product = policy.product_at(pos);
    ++stats.views[product];
    const std::optional<bool> next = outcome.continuation(pos);
    if (outcome.purchased(pos)) {
      ++stats.buys[product];
      if (next) {
        ++stats.buy_events;
        stats.buy_continues += *next ? 1 : 0;
      }
    } else if (next) {
      ++stats.skip_events;
      stats.skip_continues += *next ? 1 : 0;
    }
  }
}

PointEstimates point_estimates(const NonContextualStats& stats) {
  PointEstimates est;
  est.lambda.reserve(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    est.lambda.push_back(ratio(stats.buys[k], stats.views[k]));
  }
  est.q = ratio(stats.skip_continues, stats.skip_events);
  est.w = ratio(stats.buy_continues, stats.buy_events);
  return est;
}

double hoeffding_radius(std::uint64_t t, std::int64_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  return radius(std::sqrt(2.0), t, n);
}

OptimisticEstimates initial_estimates(std::size_t n, const GlobalConfig& config) {
  const double q_cap = 1.0 - config.epsilon_q;
  return {std::vector<double>(n, 1.0), q_cap, q_cap};
}

OptimisticEstimates optimistic_estimates(const NonContextualStats& stats, std::uint64_t t,
                                         const ExplorationWeights& weights,
                                         const GlobalConfig& config) {
  if (t < 1) throw ValidationError("round index must be at least 1");
  const double q_cap = 1.0 - config.epsilon_q;
  const PointEstimates point = point_estimates(stats);

  OptimisticEstimates est;
  est.lambda.resize(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    est.lambda[k] = point.lambda[k]
                        ? std::min(1.0, *point.lambda[k] + radius(weights.xi_lambda, t, stats.views[k]))
                        : 1.0;
  }
  est.q = point.q ? std::min(q_cap, *point.q + radius(weights.xi_q, t, stats.skip_events)) : q_cap;
  const double w_raw =
      point.w ? *point.w + radius(weights.xi_w, t, stats.buy_events) : q_cap;
  est.w = std::min(est.q, w_raw);
  return est;
}

OptimisticEstimates greedy_estimates(const NonContextualStats& stats, const GlobalConfig& config) {
  return optimistic_estimates(stats, 1, ExplorationWeights{0.0, 0.0, 0.0}, config);
}

RankingPolicy mpb_ucb_policy(const OptimisticEstimates& estimates, const ProductCatalog& catalog) {
  return optimal_ranking(estimates.lambda, estimates.q, estimates.s(), catalog);
}

StepResult mpb_ucb_step(NonContextualState& state, const ProductCatalog& catalog,
                        const GlobalConfig& config, const ExplorationWeights& weights,
                        const ConsumerProfile& true_profile, RandomStream& rng,
                        const SimulationOptions& sim) {
  RankingPolicy policy = mpb_ucb_policy(state.estimates, catalog);
  SessionOutcome outcome = simulate_session(true_profile, policy, rng, sim);
  update_stats(state.stats, outcome, policy);
  ++state.round;
  state.estimates = optimistic_estimates(state.stats, state.round, weights, config);
  return {std::move(policy), std::move(outcome)};
}

}  // namespace mpb
