#pragma once

#include <cstdint>
#include <vector>

#include "acd/innovation.hpp"
#include "acd/params.hpp"
#include "acd/rng.hpp"
#include "acd/series.hpp"

namespace acd {

struct SimConfig {
  ParamTheta theta0{1.0, 0.5, 0.5};
  InnovationSpec innov = InnovationSpec::exponential();
  double t_span = 1000.0;
  int burn_in = 1000;
  std::uint64_t seed = 1;

  // Throws Config for bad span/burn-in, Domain for non-stationary parameters.
  void validate() const;
};

// Durations on [0, t_span]: the recursion starts from x = psi = 0, runs
// `burn_in` steps whose last value becomes x0, then keeps exactly
// n(t) = max{k : x_1 + ... + x_k <= t_span} durations.
// Throws EmptySeries when not even x_1 fits into the span.
DurationSeries simulate_span(const SimConfig& cfg);
DurationSeries simulate_span(const SimConfig& cfg, Rng& rng);

// Same recursion, but returns the first `count` post-burn-in durations
// regardless of any span (t_span of the result is their sum). The draws are
// identical to simulate_span for the same generator.
DurationSeries simulate_count(const ParamTheta& theta0, const InnovationSpec& innov, int burn_in,
                              std::size_t count, Rng& rng);

struct CalibrationResult {
  double t_span = 0.0;
  double achieved_median = 0.0;
  int iterations = 0;
};

// Span t whose pilot median of n(t) over `pilot_reps` common-random-number
// paths matches `target_median_n` within 2%. Throws Calibration on failure.
CalibrationResult calibrate_span(const ParamTheta& theta0, const InnovationSpec& innov,
                                 std::size_t target_median_n, std::size_t pilot_reps, std::uint64_t seed,
                                 int burn_in = 1000);

// Median of a sample (mean of the two central order statistics for even size).
double median(std::vector<double> values);

}  // namespace acd
