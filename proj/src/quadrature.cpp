#include "acd/quadrature.hpp"

#include <cmath>
#include <iterator>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace acd {

namespace {
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr unsigned kMaxDepth = 30;
constexpr double kRelTol = 1e-14;
}  // namespace

QuadratureResult integrate_exp_weighted(const std::function<double(double)>& h) {
  double err_head = 0.0;
  const double head = Kronrod::integrate(
      [&](double u) {
        if (u <= 0.0) return 0.0;
        const double s = u * u * u;
        return 3.0 * u * u * std::exp(-s) * h(s);
      },
      0.0, 1.0, kMaxDepth, kRelTol, &err_head);
  // Finite pieces keep integrands that peak far from the origin (high moments)
  // resolved; the last piece uses the infinite-range transform.
  static constexpr double kCuts[] = {1.0, 8.0, 32.0, 128.0, 512.0};
  auto weighted = [&](double s) {
    const double w = std::exp(-s);
    if (w == 0.0) return 0.0;
    return w * h(s);
  };
  double tail = 0.0;
  double err_tail = 0.0;
  for (std::size_t k = 0; k < std::size(kCuts); ++k) {
    const double b = k + 1 < std::size(kCuts) ? kCuts[k + 1] : std::numeric_limits<double>::infinity();
    double e = 0.0;
    tail += Kronrod::integrate(weighted, kCuts[k], b, kMaxDepth, kRelTol, &e);
    err_tail += e;
  }
  return {head + tail, err_head + err_tail};
}

QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, kMaxDepth, kRelTol, &err);
  return {v, err};
}

}  // namespace acd
