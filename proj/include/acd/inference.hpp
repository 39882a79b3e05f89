#pragma once

#include <string>

#include <Eigen/Core>

#include "acd/likelihood.hpp"

namespace acd {

enum class SigmaMethod { InfoScaled, Sandwich };

const char* to_string(SigmaMethod method) noexcept;
SigmaMethod sigma_method_from_string(const std::string& name);

enum class Hypothesis {
  IacdTwoSided,       // H: alpha + beta = 1 vs != 1 (tau and normalized QLR)
  InfiniteMeanLeft,   // H: alpha + beta >= 1 vs < 1, reject when tau < q(eta)
  FiniteSumLeq1Right  // H: alpha + beta <= 1 vs > 1, reject when tau > q(1 - eta)
};

// Finite-sample covariance of theta_hat: sigma2_eps_hat * I^{-1} (InfoScaled)
// or I^{-1} J I^{-1} with J the outer product of scores (Sandwich).
// Throws SingularInformation (with the condition number) when I cannot be
// inverted or the result is not positive definite.
Eigen::Matrix3d parameter_covariance(const FitResult& fit, SigmaMethod method);

// Asymptotic variance estimate on the sqrt(t / log t) scale:
//   Sigma_hat = (t / log t) * parameter_covariance(fit, method).
// Requires an unrestricted fit and t_span > 1.
Eigen::Matrix3d sigma_hat(const FitResult& fit, SigmaMethod method);

// tau = sqrt(t / log t) (alpha_hat + beta_hat - 1) / sqrt(g' Sigma_hat g),
// g = (0, 1, 1)'. Throws Domain for a nonpositive quadratic form.
double tau_stat(const FitResult& fit, const Eigen::Matrix3d& sigma);

// 2 [L(theta_hat) - L(theta(phi_tilde))], optionally divided by
// sigma2_eps_hat of the unrestricted fit. Small negatives (above
// -1e-8 |L|) are clamped to zero; larger ones throw Inconsistent.
double qlr_stat(const FitResult& fit_u, const FitResult& fit_r, bool normalize);

struct Decisions {
  bool iacd_tau = false;        // |tau| > Phi^{-1}(1 - eta/2)
  bool iacd_qlr = false;        // QLR / sigma2 > chi2_1 upper eta quantile
  bool infinite_mean = false;   // tau < Phi^{-1}(eta)
  bool finite_sum_leq1 = false; // tau > Phi^{-1}(1 - eta)
};

struct TestReport {
  double tau = 0.0;
  double qlr = 0.0;
  double qlr_normalized = 0.0;
  Eigen::Matrix3d sigma_hat = Eigen::Matrix3d::Zero();
  SigmaMethod sigma_method = SigmaMethod::Sandwich;
  Eigen::Vector3d se_theta = Eigen::Vector3d::Zero();  // standard errors of omega, alpha, beta
  double sum = 0.0;                                    // alpha_hat + beta_hat
  double se_sum = 0.0;                                 // standard error of alpha_hat + beta_hat
  double p_two_sided = 1.0;
  double p_left = 0.5;
  double p_right = 0.5;
  double p_qlr = 1.0;
  double eta = 0.05;
  Decisions decisions;
};

// Statistics, p-values and all test decisions at level eta.
TestReport build_report(const FitResult& fit_u, const FitResult& fit_r, SigmaMethod method, double eta);

// Tau-based decision for one hypothesis at level eta. Throws Config for eta
// outside (0, 1).
bool decide(double tau, Hypothesis hypothesis, double eta);

}  // namespace acd
