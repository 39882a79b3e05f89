#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "acd/series.hpp"
#include "acd/tape.hpp"

namespace acd {

// Cubic regression spline for the intraday duration pattern. The spline is
// fitted to log durations and stored already shifted so that
// exp(spline) averages to one over the session.
class DiurnalModel {
 public:
  // Least squares on a clamped cubic B-spline basis with breakpoints every
  // `knot_spacing` seconds. Intervals holding fewer than 10 durations are
  // merged into their sparser neighbour (recorded in warnings()). Throws
  // Solver on a rank-deficient design.
  static DiurnalModel fit(const RawDurations& raw, double knot_spacing = 1800.0);

  // Constant curve equal to one.
  static DiurnalModel flat(double session_length);

  double operator()(double time_of_day) const;  // fitted curve, > 0
  double log_curve(double time_of_day) const;

  // (1 / length) * integral of the fitted curve over the session.
  double session_average() const;

  double session_length() const noexcept { return length_; }
  // Breakpoints including both session ends.
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Basis matrix (rows = points, columns = B-splines).
  Eigen::MatrixXd basis(const std::vector<double>& time_of_day) const;

  nlohmann::json to_json() const;
  static DiurnalModel from_json(const nlohmann::json& j);

 private:
  double length_ = 23400.0;
  std::vector<double> breaks_;
  std::vector<double> coef_;
  std::vector<std::string> warnings_;

  std::vector<double> knot_vector() const;
};

struct AdjustedSeries {
  DurationSeries series;            // x0 = first adjusted duration, x = the rest
  std::vector<double> time_of_day;  // n + 1 entries, first belongs to x0
  std::vector<long> day;            // n + 1 entries
};

// x_i = raw_i / curve(stamp_i); t_span = days * session length. With
// `daily_reset` the filter restarts at the first duration of every day.
// Throws Ingest for stamps outside the session.
AdjustedSeries diurnal_adjust(const RawDurations& raw, const DiurnalModel& model, bool daily_reset = false);

}  // namespace acd
