#pragma once

#include <cstddef>
#include <vector>

namespace acd {

struct AcfResult {
  std::vector<double> rho;  // lags 1..max_lag
  double band = 0.0;        // +/- Phi^{-1}((1 + level) / 2) / sqrt(n)
  std::size_t n = 0;

  std::size_t outside_band() const noexcept;
};

// Mean-corrected sample autocorrelations normalized by the lag-0
// autocovariance. Throws Config unless n > max_lag >= 1, Domain for a
// constant series.
AcfResult acf(const std::vector<double>& values, std::size_t max_lag, double level = 0.95);

}  // namespace acd
