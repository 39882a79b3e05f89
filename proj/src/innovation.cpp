#include "acd/innovation.hpp"

#include <cmath>

#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/quadrature.hpp"

namespace acd {

InnovationSpec::InnovationSpec(InnovationLaw law, double nu) noexcept
    : law_(law), nu_(nu), scale_(law == InnovationLaw::Exponential ? 1.0 : std::tgamma(1.0 + 1.0 / nu)) {}

InnovationSpec InnovationSpec::weibull(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorKind::Config, fmt::format("Weibull shape must be positive, got {}", nu));
  }
  return InnovationSpec(InnovationLaw::Weibull, nu);
}

double InnovationSpec::variance() const {
  if (law_ == InnovationLaw::Exponential) return 1.0;
  const double g1 = std::tgamma(1.0 + 1.0 / nu_);
  const double g2 = std::tgamma(1.0 + 2.0 / nu_);
  return g2 / (g1 * g1) - 1.0;
}

double InnovationSpec::density(double x) const {
  if (x < 0.0) return 0.0;
  if (law_ == InnovationLaw::Exponential) return std::exp(-x);
  const double z = x * scale_;
  return nu_ * scale_ * std::pow(z, nu_ - 1.0) * std::exp(-std::pow(z, nu_));
}

double InnovationSpec::from_standard_exponential(double s) const noexcept {
  if (law_ == InnovationLaw::Exponential) return s;
  return std::pow(s, 1.0 / nu_) / scale_;
}

double InnovationSpec::sample(Rng& rng) const noexcept {
  return from_standard_exponential(-std::log(rng.uniform()));
}

double InnovationSpec::expect(const std::function<double(double)>& g) const {
  const auto r = integrate_exp_weighted([&](double s) { return g(from_standard_exponential(s)); });
  if (!std::isfinite(r.value) || r.error > 1e-12 * std::max(1.0, std::abs(r.value))) {
    throw Error(ErrorKind::Solver,
                fmt::format("quadrature did not converge for {}: value {}, error estimate {}", str(),
                            r.value, r.error));
  }
  return r.value;
}

InnovationSpec::McEstimate InnovationSpec::expect_monte_carlo(const std::function<double(double)>& g,
                                                              std::uint64_t draws, Rng& rng) const {
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 1; k <= draws; ++k) {
    const double v = g(sample(rng));
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  const double var = draws > 1 ? m2 / static_cast<double>(draws - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(draws))};
}

std::string InnovationSpec::str() const {
  if (law_ == InnovationLaw::Exponential) return "exponential";
  return fmt::format("weibull(nu={:.6g})", nu_);
}

}  // namespace acd
