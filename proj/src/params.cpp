#include "acd/params.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "acd/errors.hpp"

namespace acd {

std::optional<double> ParamTheta::mean_duration() const noexcept {
  const double gap = 1.0 - persistence();
  if (gap <= 0.0) return std::nullopt;
  return omega / gap;
}

bool ParamTheta::admissible() const noexcept {
  return std::isfinite(omega) && std::isfinite(alpha) && std::isfinite(beta) &&
         omega > 0.0 && alpha > 0.0 && beta >= 0.0;
}

std::string ParamTheta::str() const {
  return fmt::format("(omega={:.6g}, alpha={:.6g}, beta={:.6g})", omega, alpha, beta);
}

bool ParamBounds::contains(const ParamTheta& t) const noexcept {
  return t.omega >= omega_lo && t.omega <= omega_hi && t.alpha >= alpha_lo &&
         t.alpha <= alpha_hi && t.beta >= beta_lo && t.beta <= beta_hi;
}

ParamTheta ParamBounds::clamp(const ParamTheta& t) const noexcept {
  return {std::clamp(t.omega, omega_lo, omega_hi),
          std::clamp(t.alpha, alpha_lo, alpha_hi),
          std::clamp(t.beta, beta_lo, beta_hi)};
}

void ParamBounds::validate() const {
  if (!(omega_lo > 0.0) || !(alpha_lo > 0.0) || !(beta_lo >= 0.0)) {
    throw Error(ErrorKind::Config, "parameter bounds: omega and alpha lower bounds must be > 0, beta >= 0");
  }
  if (!(omega_lo < omega_hi) || !(alpha_lo < alpha_hi) || !(beta_lo < beta_hi)) {
    throw Error(ErrorKind::Config, "parameter bounds: each lower bound must be below its upper bound");
  }
}

}  // namespace acd
