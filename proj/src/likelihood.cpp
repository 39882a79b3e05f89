#include "acd/likelihood.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/optimize.hpp"

namespace acd {

namespace {

[[noreturn]] void overflow(std::size_t i, const ParamTheta& theta) {
  throw Error(ErrorKind::FilterOverflow,
              fmt::format("conditional duration overflow at index {} for {}", i + 1, theta.str()));
}

}  // namespace

double loglik(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule) {
  const auto& x = series.x;
  const double w = theta.omega, a = theta.alpha, b = theta.beta;
  auto next_reset = series.resets.begin();
  double x_prev = series.x0;
  double psi_prev = rule == Psi0Rule::EqualX0 ? series.x0 : w;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (next_reset != series.resets.end() && *next_reset == i) {
      ++next_reset;
      if (i > 0) psi_prev = rule == Psi0Rule::EqualX0 ? x_prev : w;
    }
    const double psi = w + a * x_prev + b * psi_prev;
    if (!std::isfinite(psi)) overflow(i, theta);
    sum -= std::log(psi) + x[i] / psi;
    x_prev = x[i];
    psi_prev = psi;
  }
  return sum;
}

LikelihoodDerivatives score_and_info(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule) {
  const auto& x = series.x;
  const double w = theta.omega, a = theta.alpha, b = theta.beta;

  // d = d psi / d theta. The second derivative of psi is nonzero only in the
  // beta row/column: h = (d2psi/dbeta domega, d2psi/dbeta dalpha, d2psi/dbeta2).
  std::array<double, 3> d{};
  std::array<double, 3> h{};
  auto restart = [&](double x_prev) {
    h = {0.0, 0.0, 0.0};
    if (rule == Psi0Rule::EqualX0) {
      d = {0.0, 0.0, 0.0};
      return x_prev;
    }
    d = {1.0, 0.0, 0.0};
    return w;
  };

  double x_prev = series.x0;
  double psi_prev = restart(series.x0);
  auto next_reset = series.resets.begin();

  double ll = 0.0;
  std::array<double, 3> s_sum{};
  // Upper triangles, order (00, 01, 02, 11, 12, 22).
  std::array<double, 6> info{};
  std::array<double, 6> opg{};

  for (std::size_t i = 0; i < x.size(); ++i) {
    if (next_reset != series.resets.end() && *next_reset == i) {
      ++next_reset;
      if (i > 0) psi_prev = restart(x_prev);
    }
    const double psi = w + a * x_prev + b * psi_prev;
    if (!std::isfinite(psi)) overflow(i, theta);

    const std::array<double, 3> dn{1.0 + b * d[0], x_prev + b * d[1], psi_prev + b * d[2]};
    const std::array<double, 3> hn{b * h[0] + d[0], b * h[1] + d[1], b * h[2] + 2.0 * d[2]};
    d = dn;
    h = hn;

    const double u = x[i] / psi;
    const double dl = (u - 1.0) / psi;                // d l_i / d psi
    const double d2l = (2.0 * u - 1.0) / (psi * psi);  // -d2 l_i / d psi2
    ll -= std::log(psi) + u;

    const double s0 = dl * d[0], s1 = dl * d[1], s2 = dl * d[2];
    s_sum[0] += s0;
    s_sum[1] += s1;
    s_sum[2] += s2;

    info[0] += d2l * d[0] * d[0];
    info[1] += d2l * d[0] * d[1];
    info[2] += d2l * d[0] * d[2] - dl * h[0];
    info[3] += d2l * d[1] * d[1];
    info[4] += d2l * d[1] * d[2] - dl * h[1];
    info[5] += d2l * d[2] * d[2] - dl * h[2];

    opg[0] += s0 * s0;
    opg[1] += s0 * s1;
    opg[2] += s0 * s2;
    opg[3] += s1 * s1;
    opg[4] += s1 * s2;
    opg[5] += s2 * s2;

    x_prev = x[i];
    psi_prev = psi;
  }

  auto sym = [](const std::array<double, 6>& u) {
    Eigen::Matrix3d m;
    m << u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5];
    return m;
  };
  LikelihoodDerivatives out;
  out.loglik = ll;
  out.score = Eigen::Vector3d(s_sum[0], s_sum[1], s_sum[2]);
  out.info = sym(info);
  out.opg = sym(opg);
  return out;
}

std::vector<double> residuals(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule) {
  auto psi = psi_filter(theta, series, rule);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = series.x[i] / psi[i];
  return psi;
}

Eigen::Matrix<double, 3, 2> restriction_jacobian() {
  Eigen::Matrix<double, 3, 2> g;
  g << 1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  return g;
}

void FitOptions::validate() const {
  bounds.validate();
  if (starts < 1 || starts > 5) {
    throw Error(ErrorKind::Config, fmt::format("number of starts must be in 1..5, got {}", starts));
  }
  if (max_iter < 1 || !(grad_tol_per_obs > 0.0) || !(step_tol > 0.0)) {
    throw Error(ErrorKind::Config, "optimizer tolerances must be positive");
  }
}

FitResult evaluate_at(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule, bool restricted) {
  const auto der = score_and_info(theta, series, rule);
  FitResult r;
  r.theta_hat = theta;
  r.loglik = der.loglik;
  r.score = der.score;
  r.info = der.info;
  r.opg = der.opg;
  r.residuals = residuals(theta, series, rule);
  const double n = static_cast<double>(r.residuals.size());
  const double mean = std::accumulate(r.residuals.begin(), r.residuals.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : r.residuals) ss += (e - mean) * (e - mean);
  r.sigma2_eps_hat = ss / n;
  r.n = series.n();
  r.t_span = series.t_span;
  r.restricted = restricted;
  r.psi0_rule = rule;
  return r;
}

namespace {

void check_series(const DurationSeries& series, const FitOptions& options) {
  options.validate();
  series.validate();
  if (series.n() < options.min_n) {
    throw Error(ErrorKind::Config,
                fmt::format("series has {} durations; at least {} are required for estimation", series.n(),
                            options.min_n));
  }
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Moment-flavoured start followed by perturbations around the likelihood ridge.
struct StartPoint {
  double omega_factor, alpha, beta;
};
constexpr std::array<StartPoint, 5> kStarts{{
    {0.1, 0.1, 0.8},
    {0.05, 0.05, 0.9},
    {0.2, 0.2, 0.7},
    {0.1, 0.3, 0.65},
    {0.02, 0.05, 0.94},
}};

struct Candidate {
  BoxNewtonResult run;
  bool ok = false;
};

// Highest loglik among converged runs, ties broken by gradient norm.
const Candidate* pick_best(const std::vector<Candidate>& cands) {
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!c.ok || !c.run.converged) continue;
    if (best == nullptr || c.run.at.value > best->run.at.value ||
        (c.run.at.value == best->run.at.value && c.run.proj_grad_norm < best->run.proj_grad_norm)) {
      best = &c;
    }
  }
  return best;
}

std::string describe_failures(const std::vector<Candidate>& cands) {
  std::string msg;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    msg += fmt::format("\n  start {}: {}", k + 1, cands[k].ok ? cands[k].run.message : "could not evaluate start");
  }
  return msg;
}

}  // namespace

FitResult fit_unrestricted(const DurationSeries& series, const FitOptions& options) {
  check_series(series, options);
  const auto rule = options.psi0_rule;
  const double scale = mean_of(series.x);

  auto full = [&](const Eigen::VectorXd& v) {
    const auto der = score_and_info({v[0], v[1], v[2]}, series, rule);
    return NewtonPoint{der.loglik, der.score, der.info};
  };
  auto value = [&](const Eigen::VectorXd& v) {
    try {
      return loglik({v[0], v[1], v[2]}, series, rule);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  BoxNewtonOptions bn;
  bn.max_iter = options.max_iter;
  bn.grad_tol = options.grad_tol_per_obs * static_cast<double>(series.n());
  bn.step_tol = options.step_tol;
  const Eigen::VectorXd lo = options.bounds.lower();
  const Eigen::VectorXd hi = options.bounds.upper();

  std::vector<Candidate> cands;
  for (int k = 0; k < options.starts; ++k) {
    const auto& sp = kStarts[static_cast<std::size_t>(k)];
    Eigen::VectorXd start(3);
    start << sp.omega_factor * scale, sp.alpha, sp.beta;
    Candidate c;
    try {
      c.run = maximize_box_newton(full, value, start, lo, hi, bn);
      c.ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FilterOverflow) throw;
    }
    cands.push_back(std::move(c));
  }

  const Candidate* best = pick_best(cands);
  if (best == nullptr) {
    throw Error(ErrorKind::NonConvergence,
                fmt::format("unrestricted fit: no start converged (n={}){}", series.n(), describe_failures(cands)));
  }
  const auto& x = best->run.x;
  FitResult r = evaluate_at({x[0], x[1], x[2]}, series, rule, false);
  r.converged = true;
  r.iterations = best->run.iterations;
  r.grad_norm = best->run.proj_grad_norm;
  return r;
}

FitResult fit_restricted(const DurationSeries& series, const FitOptions& options) {
  check_series(series, options);
  const auto rule = options.psi0_rule;
  const double scale = mean_of(series.x);
  const auto gamma = restriction_jacobian();

  auto theta_of = [](const Eigen::VectorXd& v) { return ParamPhi{v[0], v[1]}.theta(); };
  auto full = [&](const Eigen::VectorXd& v) {
    const auto der = score_and_info(theta_of(v), series, rule);
    return NewtonPoint{der.loglik, gamma.transpose() * der.score, gamma.transpose() * der.info * gamma};
  };
  auto value = [&](const Eigen::VectorXd& v) {
    try {
      return loglik(theta_of(v), series, rule);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const auto& b = options.bounds;
  Eigen::VectorXd lo(2), hi(2);
  lo << b.omega_lo, std::max(b.alpha_lo, 1.0 - b.beta_hi);
  hi << b.omega_hi, std::min(b.alpha_hi, 1.0 - b.beta_lo);
  if (!(lo[1] < hi[1])) {
    throw Error(ErrorKind::Config, "parameter bounds leave no room for alpha + beta = 1");
  }

  BoxNewtonOptions bn;
  bn.max_iter = options.max_iter;
  bn.grad_tol = options.grad_tol_per_obs * static_cast<double>(series.n());
  bn.step_tol = options.step_tol;

  constexpr std::array<double, 5> kAlphaStarts{0.1, 0.05, 0.2, 0.4, 0.7};
  std::vector<Candidate> cands;
  for (int k = 0; k < options.starts; ++k) {
    Eigen::VectorXd start(2);
    start << kStarts[static_cast<std::size_t>(k)].omega_factor * scale, kAlphaStarts[static_cast<std::size_t>(k)];
    Candidate c;
    try {
      c.run = maximize_box_newton(full, value, start, lo, hi, bn);
      c.ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FilterOverflow) throw;
    }
    cands.push_back(std::move(c));
  }

  const Candidate* best = pick_best(cands);
  if (best == nullptr) {
    throw Error(ErrorKind::NonConvergence,
                fmt::format("restricted fit: no start converged (n={}){}", series.n(), describe_failures(cands)));
  }
  FitResult r = evaluate_at(theta_of(best->run.x), series, rule, true);
  r.converged = true;
  r.iterations = best->run.iterations;
  r.grad_norm = best->run.proj_grad_norm;
  return r;
}

}  // namespace acd
