#pragma once

#include <cstddef>
#include <vector>

namespace acd {

// Durations x_1..x_n observed on the calendar span [0, t_span], with x0 the
// duration preceding x_1 (used only to start the filter).
struct DurationSeries {
  double x0 = 1.0;
  std::vector<double> x;
  double t_span = 0.0;
  // Optional indices (0-based into x) at which the filter is restarted, e.g.
  // the first duration of each trading day. Empty means no restarts.
  std::vector<std::size_t> resets;

  std::size_t n() const noexcept { return x.size(); }
  double total() const noexcept;

  // Throws Config unless x0 > 0, all x_i > 0 and finite, and t_span > 0.
  void validate() const;
};

}  // namespace acd
