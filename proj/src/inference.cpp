#include "acd/inference.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/normal.hpp"

namespace acd {

const char* to_string(SigmaMethod method) noexcept {
  return method == SigmaMethod::Sandwich ? "sandwich" : "info";
}

SigmaMethod sigma_method_from_string(const std::string& name) {
  if (name == "sandwich") return SigmaMethod::Sandwich;
  if (name == "info") return SigmaMethod::InfoScaled;
  throw Error(ErrorKind::Config, fmt::format("unknown variance method '{}' (expected sandwich or info)", name));
}

namespace {

const Eigen::Vector3d kSumDirection(0.0, 1.0, 1.0);

double condition_number(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

void require_positive_definite(const Eigen::Matrix3d& m, const char* what) {
  const double cond = condition_number(m);
  if (!(cond < 1e14)) {
    throw Error(ErrorKind::SingularInformation,
                fmt::format("{} is singular or indefinite (condition number {:.3g})", what, cond));
  }
}

}  // namespace

Eigen::Matrix3d parameter_covariance(const FitResult& fit, SigmaMethod method) {
  const Eigen::Matrix3d info = 0.5 * (fit.info + fit.info.transpose());
  require_positive_definite(info, "information matrix");
  const Eigen::Matrix3d inv = info.llt().solve(Eigen::Matrix3d::Identity());
  Eigen::Matrix3d cov;
  if (method == SigmaMethod::InfoScaled) {
    cov = fit.sigma2_eps_hat * inv;
  } else {
    cov = inv * fit.opg * inv;
  }
  cov = 0.5 * (cov + cov.transpose());
  require_positive_definite(cov, "parameter covariance");
  return cov;
}

Eigen::Matrix3d sigma_hat(const FitResult& fit, SigmaMethod method) {
  if (fit.restricted) throw Error(ErrorKind::Config, "variance estimator needs the unrestricted fit");
  if (!fit.converged) throw Error(ErrorKind::NonConvergence, "variance estimator needs a converged fit");
  if (!(fit.t_span > 1.0)) {
    throw Error(ErrorKind::Config, fmt::format("time span must exceed 1 for the t/log t scaling, got {}", fit.t_span));
  }
  const double rate = fit.t_span / std::log(fit.t_span);
  return rate * parameter_covariance(fit, method);
}

double tau_stat(const FitResult& fit, const Eigen::Matrix3d& sigma) {
  const double q = kSumDirection.dot(sigma * kSumDirection);
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::Domain, fmt::format("quadratic form g' Sigma g = {} is not positive", q));
  }
  const double rate = fit.t_span / std::log(fit.t_span);
  return std::sqrt(rate) * (fit.theta_hat.alpha + fit.theta_hat.beta - 1.0) / std::sqrt(q);
}

double qlr_stat(const FitResult& fit_u, const FitResult& fit_r, bool normalize) {
  if (fit_u.restricted || !fit_r.restricted) {
    throw Error(ErrorKind::Config, "QLR needs an unrestricted and a restricted fit, in that order");
  }
  if (fit_u.n != fit_r.n || fit_u.psi0_rule != fit_r.psi0_rule) {
    throw Error(ErrorKind::Config, "QLR fits must share the series and the psi0 rule");
  }
  double raw = 2.0 * (fit_u.loglik - fit_r.loglik);
  if (raw < 0.0) {
    if (raw < -1e-8 * std::abs(fit_u.loglik)) {
      throw Error(ErrorKind::Inconsistent,
                  fmt::format("restricted loglik {} exceeds unrestricted loglik {}", fit_r.loglik, fit_u.loglik));
    }
    raw = 0.0;
  }
  if (!normalize) return raw;
  if (!(fit_u.sigma2_eps_hat > 0.0)) throw Error(ErrorKind::Domain, "residual variance is not positive");
  return raw / fit_u.sigma2_eps_hat;
}

bool decide(double tau, Hypothesis hypothesis, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::Config, fmt::format("level eta must lie in (0, 1), got {}", eta));
  }
  switch (hypothesis) {
    case Hypothesis::IacdTwoSided:
      return std::abs(tau) > normal_quantile(1.0 - 0.5 * eta);
    case Hypothesis::InfiniteMeanLeft:
      return tau < normal_quantile(eta);
    case Hypothesis::FiniteSumLeq1Right:
      return tau > normal_quantile(1.0 - eta);
  }
  return false;
}

TestReport build_report(const FitResult& fit_u, const FitResult& fit_r, SigmaMethod method, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::Config, fmt::format("level eta must lie in (0, 1), got {}", eta));
  }
  TestReport r;
  r.eta = eta;
  r.sigma_method = method;
  r.sigma_hat = sigma_hat(fit_u, method);
  const Eigen::Matrix3d cov = parameter_covariance(fit_u, method);
  r.se_theta = cov.diagonal().cwiseSqrt();
  r.sum = fit_u.theta_hat.alpha + fit_u.theta_hat.beta;
  r.se_sum = std::sqrt(kSumDirection.dot(cov * kSumDirection));
  r.tau = tau_stat(fit_u, r.sigma_hat);
  r.qlr = qlr_stat(fit_u, fit_r, false);
  r.qlr_normalized = qlr_stat(fit_u, fit_r, true);
  r.p_left = normal_cdf(r.tau);
  r.p_right = normal_cdf(-r.tau);
  r.p_two_sided = 2.0 * normal_cdf(-std::abs(r.tau));
  r.p_qlr = chi2_1_survival(r.qlr_normalized);
  r.decisions.iacd_tau = decide(r.tau, Hypothesis::IacdTwoSided, eta);
  r.decisions.iacd_qlr = r.qlr_normalized > chi2_1_upper_quantile(eta);
  r.decisions.infinite_mean = decide(r.tau, Hypothesis::InfiniteMeanLeft, eta);
  r.decisions.finite_sum_leq1 = decide(r.tau, Hypothesis::FiniteSumLeq1Right, eta);
  return r;
}

}  // namespace acd
