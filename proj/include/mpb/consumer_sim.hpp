#pragma once

// Sampling of consumer browse sessions under the choice model.

#include <cstddef>

#include "mpb/model.hpp"
#include "mpb/rng.hpp"

namespace mpb {

struct SessionDraw {
  std::size_t v = 1;  // attention span
  std::size_t b = 1;  // purchase budget
};

struct SimulationOptions {
  /// Whether the continuation draw made after the final list position is
  /// recorded. The draw is always made; this only controls observability.
  bool observe_at_list_end = true;
};

/// k >= 1 with P(k) = p^(k-1) (1-p). Requires 0 <= p < 1.
std::size_t sample_geometric(double continue_prob, RandomStream& rng);

SessionDraw sample_session_draw(const ConsumerProfile& profile, RandomStream& rng);

/// Memoryless per-step form: a purchase draw at each viewed position followed
/// by a continuation draw with probability q (skip) or q*s (purchase).
SessionOutcome simulate_session(const ConsumerProfile& profile, const RankingPolicy& policy,
                                RandomStream& rng, const SimulationOptions& options = {});

/// Pre-sampled (V, B) form with hard cutoffs. Continuation flags are derived
/// from the cutoffs, so this form only reproduces the purchase trace.
SessionOutcome simulate_session_with_draw(const ConsumerProfile& profile,
                                          const RankingPolicy& policy, const SessionDraw& draw,
                                          RandomStream& rng);

/// Session revenue: sum of revenues of purchased products.
double realized_revenue(const SessionOutcome& outcome, const RankingPolicy& policy,
                        const ProductCatalog& catalog);

}  // namespace mpb
