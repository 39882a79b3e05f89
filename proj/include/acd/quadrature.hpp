#pragma once

#include <functional>

namespace acd {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Integral of exp(-s) * h(s) over [0, inf). The unit interval is mapped by
// s = u^3 to tame integrable endpoint singularities (log-type at 0); the
// remainder uses the infinite-range transform. Adaptive Gauss-Kronrod (61pt).
QuadratureResult integrate_exp_weighted(const std::function<double(double)>& h);

// Adaptive Gauss-Kronrod (61pt) over a finite interval.
QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b);

}  // namespace acd
