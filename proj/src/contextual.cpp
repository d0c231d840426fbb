#include "mpb/contextual.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpb/revenue.hpp"

namespace mpb {
namespace {

constexpr double kNormSlack = 1e-12;

double project(double value, double lo, double hi) { return std::clamp(value, lo, hi); }

}  // namespace

Eigen::VectorXd vec_outer(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

Eigen::VectorXd joint_feature(const Eigen::Ref<const Eigen::VectorXd>& consumer,
                              const Eigen::Ref<const Eigen::VectorXd>& product) {
  Eigen::VectorXd out(consumer.size() + product.size());
  out << consumer, product;
  return out * std::sqrt(0.5);
}

ContextFeatures::ContextFeatures(Eigen::VectorXd x, Eigen::MatrixXd y)
    : x_(std::move(x)), y_(std::move(y)), z_(vec_outer(x_, x_)) {
  if (x_.size() == 0 || y_.rows() == 0 || y_.cols() == 0) {
    throw ValidationError("context features must be non-empty");
  }
  if (x_.norm() > 1.0 + kNormSlack) throw ValidationError("consumer feature norm exceeds 1");
  for (Eigen::Index k = 0; k < y_.cols(); ++k) {
    if (y_.col(k).norm() > 1.0 + kNormSlack) {
      throw ValidationError("joint feature of product " + std::to_string(k + 1) +
                            " has norm above 1");
    }
  }
}

ConsumerProfile true_profile(const ContextFeatures& features,
                             const GroundTruthCoefficients& coefficients, double epsilon_q) {
  if (coefficients.beta_lambda.size() != static_cast<Eigen::Index>(features.joint_dim()) ||
      coefficients.beta_q.size() != static_cast<Eigen::Index>(features.consumer_dim()) ||
      coefficients.beta_s.size() != static_cast<Eigen::Index>(features.consumer_dim())) {
    throw ValidationError("coefficient dimensions do not match the features");
  }
  const Eigen::VectorXd lam = features.y().transpose() * coefficients.beta_lambda;
  std::vector<double> lambdas(static_cast<std::size_t>(lam.size()));
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    lambdas[static_cast<std::size_t>(k)] = project(lam[k], 0.0, 1.0);
  }
  const double q = project(features.x().dot(coefficients.beta_q), 0.0, 1.0 - epsilon_q);
  const double s = project(features.x().dot(coefficients.beta_s), 0.0, 1.0);
  return ConsumerProfile(std::move(lambdas), q, s, epsilon_q);
}

double confidence_radius(std::uint64_t t, std::size_t m, double alpha, std::size_t n_products,
                         double u_bound) {
  if (m == 0 || !(alpha > 0.0)) throw ValidationError("radius needs m >= 1 and alpha > 0");
  const double tt = static_cast<double>(std::max<std::uint64_t>(t, 1));
  const double md = static_cast<double>(m);
  const double inner = md * std::log(1.0 + tt * static_cast<double>(n_products) / (md * alpha)) +
                       4.0 * std::log(tt);
  return 0.5 * std::sqrt(inner) + std::sqrt(alpha) * (u_bound + 1.0) * (u_bound + 1.0);
}

void ContextualConfig::validate() const {
  if (!(epsilon_q > 0.0 && epsilon_q < 1.0)) throw ValidationError("epsilon_q must lie in (0, 1)");
  if (!(alpha_lambda > 0.0 && alpha_q > 0.0 && alpha_w > 0.0)) {
    throw ValidationError("ridge strengths must be positive");
  }
  if (!(u_bound >= 0.0)) throw ValidationError("coefficient bound U must be non-negative");
}

ContextualState::ContextualState(std::size_t m_x, std::size_t m_y, const ContextualConfig& config)
    : lambda(m_y, config.alpha_lambda), q(m_x, config.alpha_q), w(m_x * m_x, config.alpha_w) {}

namespace {

OptimisticEstimates estimates_with_bonus(const ContextualState& state,
                                         const ContextFeatures& features,
                                         const ContextualConfig& config, double bonus_lambda,
                                         double bonus_q, double bonus_w) {
  const RidgeSolution sol_lambda(state.lambda);
  const RidgeSolution sol_q(state.q);
  const RidgeSolution sol_w(state.w);
  const std::size_t n = features.n_products();

  OptimisticEstimates est;
  est.lambda.resize(n);
  const Eigen::VectorXd mean = features.y().transpose() * sol_lambda.beta();
  Eigen::VectorXd width = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (bonus_lambda != 0.0) width = sol_lambda.inverse_norms(features.y());
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    est.lambda[k] = project(mean[i] + bonus_lambda * width[i], 0.0, 1.0);
  }
  double q_raw = features.x().dot(sol_q.beta());
  if (bonus_q != 0.0) q_raw += bonus_q * sol_q.inverse_norm(features.x());
  est.q = project(q_raw, 0.0, 1.0 - config.epsilon_q);
  double w_raw = features.z().dot(sol_w.beta());
  if (bonus_w != 0.0) w_raw += bonus_w * sol_w.inverse_norm(features.z());
  est.w = project(w_raw, 0.0, est.q);
  return est;
}

void check_state(const ContextualState& state, const ContextFeatures& features) {
  if (state.lambda.dim() != features.joint_dim() || state.q.dim() != features.consumer_dim() ||
      state.w.dim() != features.consumer_dim() * features.consumer_dim()) {
    throw ValidationError("ridge state dimensions do not match the features");
  }
}

}  // namespace

OptimisticEstimates contextual_optimistic_estimates(const ContextualState& state,
                                                    const ContextFeatures& features,
                                                    std::uint64_t t,
                                                    const ContextualConfig& config,
                                                    const ContextualWeights& weights) {
  check_state(state, features);
  const std::uint64_t prev = t > 0 ? t - 1 : 0;
  const std::size_t n = features.n_products();
  const std::size_t m_x = features.consumer_dim();
  const double tau_lambda =
      confidence_radius(prev, features.joint_dim(), config.alpha_lambda, n, config.u_bound);
  const double tau_q = confidence_radius(prev, m_x, config.alpha_q, n, config.u_bound);
  const double tau_w = confidence_radius(prev, m_x * m_x, config.alpha_w, n, config.u_bound);
  return estimates_with_bonus(state, features, config, weights.xi_lambda * tau_lambda,
                              weights.xi_q * tau_q, weights.xi_w * tau_w);
}

OptimisticEstimates contextual_greedy_estimates(const ContextualState& state,
                                                const ContextFeatures& features,
                                                const ContextualConfig& config) {
  check_state(state, features);
  return estimates_with_bonus(state, features, config, 0.0, 0.0, 0.0);
}

void update_ridge_states(ContextualState& state, const ContextFeatures& features,
                         const RankingPolicy& policy, const SessionOutcome& outcome) {
  check_state(state, features);
  if (policy.size() != features.n_products() || outcome.viewed() > policy.size()) {
    throw ValidationError("session does not match the ranked products");
  }
  for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) {
    const bool bought = outcome.purchased(pos);
    state.lambda.update(features.product_feature(policy.product_at(pos)), bought ? 1.0 : 0.0);
    const std::optional<bool> next = outcome.continuation(pos);
    if (!next) continue;
    if (bought) {
      state.w.update(features.z(), *next ? 1.0 : 0.0);
    } else {
      state.q.update(features.x(), *next ? 1.0 : 0.0);
    }
  }
}

StepResult contextual_mpb_ucb_step(ContextualState& state, const ContextFeatures& features,
                                   const ProductCatalog& catalog, const ContextualConfig& config,
                                   const ContextualWeights& weights,
                                   const GroundTruthCoefficients& truth, RandomStream& rng,
                                   const SimulationOptions& sim) {
  const std::uint64_t t = state.round + 1;
  const OptimisticEstimates est =
      contextual_optimistic_estimates(state, features, t, config, weights);
  RankingPolicy policy = optimal_ranking(est.lambda, est.q, est.s(), catalog);
  const ConsumerProfile profile = true_profile(features, truth, config.epsilon_q);
  SessionOutcome outcome = simulate_session(profile, policy, rng, sim);
  update_ridge_states(state, features, policy, outcome);
  state.round = t;
  return {std::move(policy), std::move(outcome)};
}

}  // namespace mpb
