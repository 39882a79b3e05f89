#include "acd/series.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "acd/errors.hpp"

namespace acd {

double DurationSeries::total() const noexcept {
  return std::accumulate(x.begin(), x.end(), 0.0);
}

void DurationSeries::validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) {
    throw Error(ErrorKind::Config, fmt::format("initial duration x0 must be positive, got {}", x0));
  }
  if (!(t_span > 0.0) || !std::isfinite(t_span)) {
    throw Error(ErrorKind::Config, fmt::format("time span must be positive, got {}", t_span));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
      throw Error(ErrorKind::Config,
                  fmt::format("duration x[{}] = {} is not a positive finite number", i + 1, x[i]));
    }
  }
  for (std::size_t k = 0; k < resets.size(); ++k) {
    if (resets[k] >= x.size()) {
      throw Error(ErrorKind::Config, fmt::format("reset index {} beyond series length {}", resets[k], x.size()));
    }
    if (k > 0 && resets[k] <= resets[k - 1]) {
      throw Error(ErrorKind::Config, "reset indices must be strictly increasing");
    }
  }
}

}  // namespace acd
