#pragma once

namespace acd {

// Standard normal distribution function.
double normal_cdf(double x) noexcept;

// Standard normal quantile; rational approximation refined by one Halley
// step (absolute error well below 1e-10 on (0, 1)). Returns -inf/+inf at 0/1.
double normal_quantile(double p);

// Upper quantile of the chi-square distribution with one degree of freedom:
// the value q with P(chi2_1 > q) = eta.
double chi2_1_upper_quantile(double eta);

// P(chi2_1 > q).
double chi2_1_survival(double q) noexcept;

}  // namespace acd
