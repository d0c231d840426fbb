#pragma once

// Incremental ridge regression: Sigma = alpha*I + sum f f^T, rho = sum y f.

#include <cstddef>
#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace mpb {

class RidgeState {
public:
  RidgeState(std::size_t dim, double alpha);
  /// Restores a checkpointed state; Sigma must be symmetric.
  RidgeState(Eigen::MatrixXd sigma, Eigen::VectorXd rho, double alpha, std::int64_t events);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.size()); }
  double alpha() const noexcept { return alpha_; }
  std::int64_t events() const noexcept { return events_; }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  const Eigen::VectorXd& rho() const noexcept { return rho_; }

  void update(const Eigen::Ref<const Eigen::VectorXd>& feature, double response);

private:
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd rho_;
  double alpha_;
  std::int64_t events_ = 0;
};

void ridge_update(RidgeState& state, const Eigen::Ref<const Eigen::VectorXd>& feature,
                  double response);

/// Sigma^{-1} rho through a Cholesky factorization. Throws std::runtime_error
/// if Sigma is not positive definite.
Eigen::VectorXd solve_beta(const RidgeState& state);

/// Factorized snapshot of a ridge state: the coefficient estimate plus
/// Mahalanobis norms under Sigma^{-1}.
class RidgeSolution {
public:
  explicit RidgeSolution(const RidgeState& state);

  const Eigen::VectorXd& beta() const noexcept { return beta_; }
  /// sqrt(v^T Sigma^{-1} v).
  double inverse_norm(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// inverse_norm for each column of `vs`.
  Eigen::VectorXd inverse_norms(const Eigen::Ref<const Eigen::MatrixXd>& vs) const;

private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd beta_;
};

}  // namespace mpb
