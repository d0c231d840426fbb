#include "mpb/ridge.hpp"

#include <stdexcept>
#include <string>

#include "mpb/model.hpp"

namespace mpb {
namespace {

Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("ridge design matrix is not positive definite");
  }
  return llt;
}

}  // namespace

RidgeState::RidgeState(std::size_t dim, double alpha)
    : sigma_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                       static_cast<Eigen::Index>(dim)) *
             alpha),
      rho_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      alpha_(alpha) {
  if (dim == 0) throw ValidationError("ridge dimension must be positive");
  if (!(alpha > 0.0)) throw ValidationError("ridge strength must be positive");
}

RidgeState::RidgeState(Eigen::MatrixXd sigma, Eigen::VectorXd rho, double alpha,
                       std::int64_t events)
    : sigma_(std::move(sigma)), rho_(std::move(rho)), alpha_(alpha), events_(events) {
  if (rho_.size() == 0 || sigma_.rows() != rho_.size() || sigma_.cols() != rho_.size()) {
    throw ValidationError("ridge checkpoint has inconsistent dimensions");
  }
  if (!(alpha_ > 0.0)) throw ValidationError("ridge strength must be positive");
  if (!sigma_.isApprox(sigma_.transpose())) throw ValidationError("ridge Sigma must be symmetric");
}

void RidgeState::update(const Eigen::Ref<const Eigen::VectorXd>& feature, double response) {
  if (feature.size() != rho_.size()) {
    throw ValidationError("feature dimension " + std::to_string(feature.size()) +
                          " does not match ridge dimension " + std::to_string(rho_.size()));
  }
  sigma_.selfadjointView<Eigen::Lower>().rankUpdate(feature);
  sigma_.triangularView<Eigen::StrictlyUpper>() = sigma_.transpose();
  if (response != 0.0) rho_.noalias() += response * feature;
  ++events_;
}

void ridge_update(RidgeState& state, const Eigen::Ref<const Eigen::VectorXd>& feature,
                  double response) {
  state.update(feature, response);
}

Eigen::VectorXd solve_beta(const RidgeState& state) {
  return factorize(state.sigma()).solve(state.rho());
}

RidgeSolution::RidgeSolution(const RidgeState& state)
    : llt_(factorize(state.sigma())), beta_(llt_.solve(state.rho())) {}

double RidgeSolution::inverse_norm(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::VectorXd half = llt_.matrixL().solve(v);
  return half.norm();
}

Eigen::VectorXd RidgeSolution::inverse_norms(const Eigen::Ref<const Eigen::MatrixXd>& vs) const {
  const Eigen::MatrixXd half = llt_.matrixL().solve(vs);
  return half.colwise().norm().transpose();
}

}  // namespace mpb
