#include "acd/theory.hpp"

#include <cmath>

#include <fmt/format.h>

#include "acd/errors.hpp"

namespace acd {

double stationarity_functional(double alpha, double beta, const InnovationSpec& innov) {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || (alpha == 0.0 && beta == 0.0)) {
    throw Error(ErrorKind::Domain,
                fmt::format("stationarity functional needs alpha, beta >= 0, not both zero (got {}, {})",
                            alpha, beta));
  }
  if (alpha == 0.0) return std::log(beta);
  return innov.expect([=](double e) { return std::log(alpha * e + beta); });
}

double tail_index(double alpha, double beta, const InnovationSpec& innov) {
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw Error(ErrorKind::Domain, fmt::format("tail index needs alpha > 0, beta >= 0 (got {}, {})", alpha, beta));
  }
  const double drift = stationarity_functional(alpha, beta, innov);
  if (!(drift < 0.0)) {
    throw Error(ErrorKind::Domain,
                fmt::format("non-stationary parameters: E[log(alpha eps + beta)] = {} >= 0", drift));
  }
  if (std::abs(alpha + beta - 1.0) < 1e-14) return 1.0;

  auto excess = [&](double kappa) {
    return innov.expect([=](double e) { return std::pow(alpha * e + beta, kappa); }) - 1.0;
  };

  double lo = 0.0;
  double hi = 0.0;
  if (alpha + beta < 1.0) {
    // Moment of order one is below 1, so the root sits above 1.
    lo = 1.0;
    hi = 2.0;
    while (excess(hi) <= 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1024.0) {
        throw Error(ErrorKind::Solver,
                    fmt::format("tail index: no sign change up to kappa = {} for alpha={}, beta={}", hi, alpha, beta));
      }
    }
  } else {
    lo = 1e-6;
    hi = 1.0;
    while (excess(lo) >= 0.0) {
      lo *= 1e-2;
      if (lo < 1e-14) {
        throw Error(ErrorKind::Solver,
                    fmt::format("tail index: could not bracket the root below 1 for alpha={}, beta={}", alpha, beta));
      }
    }
  }

  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double kappa = 0.5 * (lo + hi);
  const double residual = excess(kappa);
  if (!(std::abs(residual) < 1e-10)) {
    throw Error(ErrorKind::Solver,
                fmt::format("tail index: residual {} at kappa={} (alpha={}, beta={})", residual, kappa, alpha, beta));
  }
  return kappa;
}

double c0_constant(double omega, double alpha, const InnovationSpec& innov) {
  if (!(omega > 0.0) || !(alpha > 0.0) || !(alpha <= 1.0)) {
    throw Error(ErrorKind::Domain,
                fmt::format("c0 needs omega > 0 and 0 < alpha <= 1 (got {}, {})", omega, alpha));
  }
  const double m = innov.expect([=](double e) {
    const double y = 1.0 + alpha * (e - 1.0);
    return y > 0.0 ? y * std::log(y) : 0.0;
  });
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorKind::Solver, fmt::format("c0: expectation E[y log y] = {} is not positive", m));
  }
  return omega / m;
}

double weibull_shape_for_variance(double target_sigma2) {
  if (!(target_sigma2 > 0.0) || !std::isfinite(target_sigma2)) {
    throw Error(ErrorKind::Config, fmt::format("target variance must be positive, got {}", target_sigma2));
  }
  auto var = [](double nu) { return InnovationSpec::weibull(nu).variance(); };
  // Gamma(1 + 2/nu) overflows below nu ~ 0.0118; variance -> 0 as nu grows.
  double lo = 0.02;
  double hi = 1e4;
  if (!(var(lo) >= target_sigma2) || !(var(hi) <= target_sigma2)) {
    throw Error(ErrorKind::Solver,
                fmt::format("no Weibull shape in [{}, {}] gives variance {}", lo, hi, target_sigma2));
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (var(mid) > target_sigma2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double nu = 0.5 * (lo + hi);
  if (!(std::abs(var(nu) - target_sigma2) < 1e-8)) {
    throw Error(ErrorKind::Solver, fmt::format("Weibull shape: residual too large at nu={}", nu));
  }
  return nu;
}

}  // namespace acd
