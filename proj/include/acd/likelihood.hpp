#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acd/filter.hpp"
#include "acd/params.hpp"
#include "acd/series.hpp"

namespace acd {

// Exponential quasi log-likelihood sum_i -(log psi_i + x_i / psi_i).
double loglik(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule);

struct LikelihoodDerivatives {
  double loglik = 0.0;
  Eigen::Vector3d score = Eigen::Vector3d::Zero();  // sum of s_i
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();   // sum of -d2 l_i
  Eigen::Matrix3d opg = Eigen::Matrix3d::Zero();    // sum of s_i s_i'
};

// Analytic score, observed information and outer product of per-observation
// scores via the filter-derivative recursions.
LikelihoodDerivatives score_and_info(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule);

// Standardized residuals x_i / psi_i(theta).
std::vector<double> residuals(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule);

// Jacobian d theta(phi) / d phi' of (omega, alpha) -> (omega, alpha, 1 - alpha).
Eigen::Matrix<double, 3, 2> restriction_jacobian();

struct FitOptions {
  ParamBounds bounds{};
  Psi0Rule psi0_rule = Psi0Rule::EqualX0;
  int starts = 5;              // 1..5 starting points
  std::size_t min_n = 10;
  int max_iter = 200;
  double grad_tol_per_obs = 1e-6;  // converged when sup|grad| < this * n
  double step_tol = 1e-10;         // and the relative step is below this

  void validate() const;
};

struct FitResult {
  ParamTheta theta_hat{};
  double loglik = 0.0;
  Eigen::Vector3d score = Eigen::Vector3d::Zero();
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d opg = Eigen::Matrix3d::Zero();
  std::vector<double> residuals;
  double sigma2_eps_hat = 0.0;  // n^{-1} sum (eps_i - mean)^2
  std::size_t n = 0;
  double t_span = 0.0;
  bool restricted = false;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // sup-norm of the (projected) gradient in the fitted coordinates
  Psi0Rule psi0_rule = Psi0Rule::EqualX0;
};

// Unrestricted QMLE over the parameter box. Throws NonConvergence if no start
// converges, Config for series shorter than options.min_n.
FitResult fit_unrestricted(const DurationSeries& series, const FitOptions& options = {});

// QMLE under alpha + beta = 1, optimizing over phi = (omega, alpha).
FitResult fit_restricted(const DurationSeries& series, const FitOptions& options = {});

// Populates every FitResult field at a given parameter value (no optimization).
FitResult evaluate_at(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule, bool restricted);

}  // namespace acd
