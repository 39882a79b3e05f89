#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "acd/rng.hpp"

namespace acd {

enum class InnovationLaw { Exponential, Weibull };

// Unit-mean innovation law for x_i = psi_i * eps_i. The Weibull(nu) law is
// rescaled by Gamma(1 + 1/nu) so that E[eps] = 1; nu = 1 is the standard
// exponential.
class InnovationSpec {
 public:
  static InnovationSpec exponential() noexcept { return InnovationSpec(InnovationLaw::Exponential, 1.0); }
  // Throws Config for nu <= 0 or non-finite.
  static InnovationSpec weibull(double nu);

  InnovationLaw law() const noexcept { return law_; }
  // Shape parameter; 1 for the exponential law.
  double nu() const noexcept { return nu_; }

  // Var[eps] = Gamma(1 + 2/nu) / Gamma(1 + 1/nu)^2 - 1.
  double variance() const;

  // Gamma(1 + 1/nu), the divisor that makes the Weibull draw unit-mean.
  double mean_scale() const noexcept { return scale_; }

  double density(double x) const;

  // Maps a standard exponential variate s to eps = s^{1/nu} / Gamma(1 + 1/nu).
  double from_standard_exponential(double s) const noexcept;

  double sample(Rng& rng) const noexcept;

  // E[g(eps)] by adaptive Gauss-Kronrod quadrature. Throws Solver if the
  // quadrature error estimate exceeds 1e-12 * max(1, |E[g]|).
  double expect(const std::function<double(double)>& g) const;

  // Monte Carlo fallback: sample mean and its standard error over `draws`.
  struct McEstimate {
    double mean;
    double std_error;
  };
  McEstimate expect_monte_carlo(const std::function<double(double)>& g, std::uint64_t draws,
                                Rng& rng) const;

  std::string str() const;

 private:
  InnovationSpec(InnovationLaw law, double nu) noexcept;

  InnovationLaw law_;
  double nu_;
  double scale_;
};

}  // namespace acd
