#pragma once

// Linear-contextual variant: lambda, q and w = q*s are linear in consumer and
// product features and are learned by three ridge regressions.

#include <cmath>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "mpb/consumer_sim.hpp"
#include "mpb/model.hpp"
#include "mpb/noncontextual.hpp"
#include "mpb/ridge.hpp"

namespace mpb {

/// Row-major vec(a b^T): entry i*b.size() + j is a_i * b_j.
Eigen::VectorXd vec_outer(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b);

/// Concatenation of consumer and product features scaled by 1/sqrt(2), so
/// unit-norm inputs give a joint feature of norm at most 1.
Eigen::VectorXd joint_feature(const Eigen::Ref<const Eigen::VectorXd>& consumer,
                              const Eigen::Ref<const Eigen::VectorXd>& product);

/// Consumer feature x, one joint feature per product (columns of y) and
/// z = vec(x x^T).
class ContextFeatures {
public:
  ContextFeatures(Eigen::VectorXd x, Eigen::MatrixXd y);

  const Eigen::VectorXd& x() const noexcept { return x_; }
  const Eigen::MatrixXd& y() const noexcept { return y_; }
  const Eigen::VectorXd& z() const noexcept { return z_; }
  auto product_feature(std::size_t k) const { return y_.col(static_cast<Eigen::Index>(k)); }
  std::size_t n_products() const noexcept { return static_cast<std::size_t>(y_.cols()); }
  std::size_t consumer_dim() const noexcept { return static_cast<std::size_t>(x_.size()); }
  std::size_t joint_dim() const noexcept { return static_cast<std::size_t>(y_.rows()); }

private:
  Eigen::VectorXd x_;
  Eigen::MatrixXd y_;
  Eigen::VectorXd z_;
};

struct GroundTruthCoefficients {
  Eigen::VectorXd beta_lambda;
  Eigen::VectorXd beta_q;
  Eigen::VectorXd beta_s;

  Eigen::VectorXd beta_w() const { return vec_outer(beta_q, beta_s); }
};

/// Per-consumer profile implied by the coefficients, clamped to the valid
/// parameter ranges.
ConsumerProfile true_profile(const ContextFeatures& features,
                             const GroundTruthCoefficients& coefficients,
                             double epsilon_q = kDefaultEpsilonQ);

/// Confidence radius tau(t, m, alpha). Rounds below 1 are evaluated at t = 1.
double confidence_radius(std::uint64_t t, std::size_t m, double alpha, std::size_t n_products,
                         double u_bound);

struct ContextualConfig {
  double epsilon_q = kDefaultEpsilonQ;
  double alpha_lambda = 1.0;
  double alpha_q = 1.0;
  double alpha_w = 1.0;
  double u_bound = 1.0;

  void validate() const;
};

/// Multipliers on tau. 1 everywhere reproduces the unscaled confidence bound.
struct ContextualWeights {
  double xi_lambda = 1.0;
  double xi_q = 1.0;
  double xi_w = 1.0;
};

struct ContextualState {
  ContextualState(std::size_t m_x, std::size_t m_y, const ContextualConfig& config);

  RidgeState lambda;
  RidgeState q;
  RidgeState w;
  std::uint64_t round = 0;  // rounds completed
};

/// Optimistic estimates for the consumer arriving in round t (1-based), using
/// the ridge states after round t-1 and radii tau(t-1, .).
OptimisticEstimates contextual_optimistic_estimates(const ContextualState& state,
                                                    const ContextFeatures& features,
                                                    std::uint64_t t,
                                                    const ContextualConfig& config,
                                                    const ContextualWeights& weights = {});

/// Projected point predictions without confidence bonus.
OptimisticEstimates contextual_greedy_estimates(const ContextualState& state,
                                                const ContextFeatures& features,
                                                const ContextualConfig& config);

/// Folds one session into the three regressions: lambda on every viewed
/// position, q on skips with an observed continuation, w on purchases with an
/// observed continuation.
void update_ridge_states(ContextualState& state, const ContextFeatures& features,
                         const RankingPolicy& policy, const SessionOutcome& outcome);

StepResult contextual_mpb_ucb_step(ContextualState& state, const ContextFeatures& features,
                                   const ProductCatalog& catalog, const ContextualConfig& config,
                                   const ContextualWeights& weights,
                                   const GroundTruthCoefficients& truth, RandomStream& rng,
                                   const SimulationOptions& sim = {});

}  // namespace mpb
