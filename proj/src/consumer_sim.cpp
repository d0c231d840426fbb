#include "mpb/consumer_sim.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace mpb {
namespace {

void check_dimensions(const ConsumerProfile& profile, const RankingPolicy& policy) {
  if (profile.size() != policy.size()) throw ValidationError("profile/ranking size mismatch");
}

// End-of-list convention lives here and nowhere else.
std::optional<bool> terminal_continuation(bool drawn, const SimulationOptions& options) {
  if (!options.observe_at_list_end) return std::nullopt;
  return drawn;
}

}  // namespace

std::size_t sample_geometric(double continue_prob, RandomStream& rng) {
  if (!(continue_prob >= 0.0 && continue_prob < 1.0)) {
    throw ValidationError("geometric continuation probability must lie in [0, 1)");
  }
  if (continue_prob == 0.0) return 1;
  // Inverse CDF: P(K > k) = p^k.
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double k = std::floor(std::log(u) / std::log(continue_prob));
  return 1 + static_cast<std::size_t>(k);
}

SessionDraw sample_session_draw(const ConsumerProfile& profile, RandomStream& rng) {
  if (profile.s() >= 1.0) throw ValidationError("budget continuation s = 1 has no finite draw");
  const std::size_t v = sample_geometric(profile.q(), rng);
  const std::size_t b = sample_geometric(profile.s(), rng);
  return {v, b};
}

SessionOutcome simulate_session(const ConsumerProfile& profile, const RankingPolicy& policy,
                                RandomStream& rng, const SimulationOptions& options) {
  check_dimensions(profile, policy);
  const std::size_t n = policy.size();
  const double q = profile.q();
  const double w = profile.w();
  std::vector<bool> purchases;
  std::vector<std::optional<bool>> continuations;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const bool bought = rng.bernoulli(profile.lambda(policy.product_at(pos)));
    const bool keep_going = rng.bernoulli(bought ? w : q);
    purchases.push_back(bought);
    const bool last = (pos + 1 == n);
    continuations.push_back(last ? terminal_continuation(keep_going, options)
                                 : std::optional<bool>(keep_going));
    if (!keep_going) break;
  }
  return SessionOutcome(std::move(purchases), std::move(continuations));
}

SessionOutcome simulate_session_with_draw(const ConsumerProfile& profile,
                                          const RankingPolicy& policy, const SessionDraw& draw,
                                          RandomStream& rng) {
  check_dimensions(profile, policy);
  if (draw.v < 1 || draw.b < 1) throw ValidationError("span and budget must be at least 1");
  const std::size_t n = policy.size();
  std::vector<bool> purchases;
  std::vector<std::optional<bool>> continuations;
  std::size_t bought_so_far = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const bool bought = rng.bernoulli(profile.lambda(policy.product_at(pos)));
    bought_so_far += bought ? 1 : 0;
    const bool stop = (pos + 1 >= draw.v) || (bought_so_far >= draw.b) || (pos + 1 == n);
    purchases.push_back(bought);
    continuations.push_back(stop ? std::optional<bool>() : std::optional<bool>(true));
    if (stop) break;
  }
  return SessionOutcome(std::move(purchases), std::move(continuations));
}

double realized_revenue(const SessionOutcome& outcome, const RankingPolicy& policy,
                        const ProductCatalog& catalog) {
  double total = 0.0;
  for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) {
    if (outcome.purchased(pos)) total += catalog.revenue(policy.product_at(pos));
  }
  return total;
}

}  // namespace mpb
