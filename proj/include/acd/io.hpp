#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acd/inference.hpp"
#include "acd/likelihood.hpp"
#include "acd/series.hpp"

namespace acd {

inline constexpr int kSchemaVersion = 1;

// Shortest text that round-trips at 17 significant digits.
std::string format_g17(double v);

// Series CSV: header "i,x" (extra columns allowed), the row with i = 0 holds
// x0 and rows 1..n the durations. t_span is not part of the file.
void write_series_csv(std::ostream& out, const DurationSeries& series);
void write_series_csv(const std::string& path, const DurationSeries& series);

struct SeriesFile {
  DurationSeries series;
  std::vector<long> day;  // per-row day label (row 0 included) when the file has a "day" column
};

// Filter restart indices (0-based into x) for day labels given per row,
// row 0 being x0: a restart wherever the day changes.
std::vector<std::size_t> daily_resets(const std::vector<long>& day);
// Throws Ingest on malformed input.
SeriesFile read_series_csv(std::istream& in, double t_span);
SeriesFile read_series_csv(const std::string& path, double t_span);

nlohmann::json to_json(const FitResult& fit, bool include_residuals = true);
FitResult fit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TestReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace acd
