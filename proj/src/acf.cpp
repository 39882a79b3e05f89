#include "acd/acf.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/normal.hpp"

namespace acd {

std::size_t AcfResult::outside_band() const noexcept {
  std::size_t k = 0;
  for (double r : rho) k += std::abs(r) > band ? 1 : 0;
  return k;
}

AcfResult acf(const std::vector<double>& v, std::size_t max_lag, double level) {
  const std::size_t n = v.size();
  if (max_lag < 1 || n <= max_lag) {
    throw Error(ErrorKind::Config, fmt::format("ACF needs n > max_lag >= 1 (n={}, max_lag={})", n, max_lag));
  }
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::Config, "ACF level must lie in (0, 1)");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double x : v) c0 += (x - mean) * (x - mean);
  if (!(c0 > 0.0)) throw Error(ErrorKind::Domain, "autocorrelation is undefined for a constant series");

  AcfResult out;
  out.n = n;
  out.band = normal_quantile(0.5 * (1.0 + level)) / std::sqrt(static_cast<double>(n));
  out.rho.reserve(max_lag);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = k; i < n; ++i) ck += (v[i] - mean) * (v[i - k] - mean);
    out.rho.push_back(ck / c0);
  }
  return out;
}

}  // namespace acd
