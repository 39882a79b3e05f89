#pragma once

#include "acd/innovation.hpp"

namespace acd {

// E[log(alpha * eps + beta)]. Strict stationarity of the duration process
// holds when this is negative. Requires alpha, beta >= 0, not both zero.
double stationarity_functional(double alpha, double beta, const InnovationSpec& innov);

// Positive root kappa of E[(alpha * eps + beta)^kappa] = 1, the tail index of
// the stationary durations. Exactly 1 on the integrated boundary
// |alpha + beta - 1| < 1e-14. Throws Domain for non-stationary parameters and
// Solver if the root cannot be bracketed.
double tail_index(double alpha, double beta, const InnovationSpec& innov);

// Constant c0 with n(t) log(t) / t -> 1 / c0 for integrated durations
// (beta = 1 - alpha):
//   c0 = omega / E[(1 + alpha (eps - 1)) log(1 + alpha (eps - 1))].
double c0_constant(double omega, double alpha, const InnovationSpec& innov);

// Weibull shape nu with Var[eps] = target_sigma2, by bisection on the
// monotonically decreasing variance map. Throws Solver outside the range the
// gamma function can represent.
double weibull_shape_for_variance(double target_sigma2);

}  // namespace acd
