#pragma once

// Sufficient statistics, estimators and the optimistic (UCB) ranking loop for
// consumers that share one parameter set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpb/consumer_sim.hpp"
#include "mpb/model.hpp"
#include "mpb/rng.hpp"

namespace mpb {

struct NonContextualStats {
  explicit NonContextualStats(std::size_t n = 0) : views(n, 0), buys(n, 0) {}

  std::vector<std::int64_t> views;  // C_k
  std::vector<std::int64_t> buys;   // c_k
  std::int64_t skip_events = 0;     // D^Q
  std::int64_t skip_continues = 0;  // d^Q
  std::int64_t buy_events = 0;      // D^W
  std::int64_t buy_continues = 0;   // d^W

  std::size_t size() const noexcept { return views.size(); }
  bool operator==(const NonContextualStats&) const = default;
};

/// Ratio estimates; nullopt marks a zero denominator.
struct PointEstimates {
  std::vector<std::optional<double>> lambda;
  std::optional<double> q;
  std::optional<double> w;
};

struct OptimisticEstimates {
  std::vector<double> lambda;
  double q = 0.0;
  double w = 0.0;

  /// Budget continuation implied by the estimates; 0 when q is 0.
  double s() const noexcept { return q > 0.0 ? std::min(1.0, w / q) : 0.0; }
};

/// Multipliers on sqrt(log t / n). sqrt(2) everywhere gives the plain
/// Hoeffding radius sqrt(2 log t / n).
struct ExplorationWeights {
  double xi_lambda = std::sqrt(2.0);
  double xi_q = std::sqrt(2.0);
  double xi_w = std::sqrt(2.0);

  void validate() const;
};

void update_stats(NonContextualStats& stats, const SessionOutcome& outcome,
                  const RankingPolicy& policy);

PointEstimates point_estimates(const NonContextualStats& stats);

/// UCB estimates after round t (t >= 1). Undefined point estimates map to the
/// optimistic initial values (1, 1 - epsilon_q, 1 - epsilon_q).
OptimisticEstimates optimistic_estimates(const NonContextualStats& stats, std::uint64_t t,
                                         const ExplorationWeights& weights,
                                         const GlobalConfig& config);

/// Values used before any data arrives.
OptimisticEstimates initial_estimates(std::size_t n, const GlobalConfig& config);

/// Point estimates with undefined entries replaced by the initial values;
/// equivalent to optimistic_estimates with zero weights.
OptimisticEstimates greedy_estimates(const NonContextualStats& stats, const GlobalConfig& config);

/// Half-width sqrt(2 log t / n) of the coverage interval; infinite for n = 0.
double hoeffding_radius(std::uint64_t t, std::int64_t n);

struct NonContextualState {
  explicit NonContextualState(std::size_t n, const GlobalConfig& config)
      : stats(n), estimates(initial_estimates(n, config)) {}

  NonContextualStats stats;
  OptimisticEstimates estimates;  // from the previous round
  std::uint64_t round = 0;        // rounds completed
};

struct StepResult {
  RankingPolicy policy;
  SessionOutcome outcome;
};

/// Ranking the current optimistic estimates would produce.
RankingPolicy mpb_ucb_policy(const OptimisticEstimates& estimates, const ProductCatalog& catalog);

/// One round: rank on the previous estimates, simulate a consumer drawn from
/// `true_profile`, fold the observation into the statistics and refresh the
/// estimates.
StepResult mpb_ucb_step(NonContextualState& state, const ProductCatalog& catalog,
                        const GlobalConfig& config, const ExplorationWeights& weights,
                        const ConsumerProfile& true_profile, RandomStream& rng,
                        const SimulationOptions& sim = {});

}  // namespace mpb
