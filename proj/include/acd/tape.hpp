#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace acd {

// Trading session layout. `open_seconds` (local time of day) and the UTC
// offset are only used to place epoch timestamps into sessions.
struct SessionSpec {
  double length = 23400.0;           // 9:30-16:00
  std::int64_t open_seconds = 34200;  // 9:30 local
  std::int64_t utc_offset_seconds = -5 * 3600;

  void validate() const;
};

SessionSpec session_from_json_file(const std::string& path);

// Trade times as (day label, seconds since session open).
struct TradeTape {
  std::vector<long> day;
  std::vector<double> time_of_day;
  SessionSpec session{};
  std::size_t dropped_outside_session = 0;  // epoch input only

  std::size_t size() const noexcept { return day.size(); }
};

// Reads "day,timestamp_seconds" or "epoch_ns" CSV (header required).
// Epoch records outside the session are dropped and counted; session-relative
// records outside [0, length] are an Ingest error.
TradeTape read_tape_csv(std::istream& in, const SessionSpec& session = {});
TradeTape read_tape_csv(const std::string& path, const SessionSpec& session = {});

// Within-day durations stamped with the time of day of the closing event.
struct RawDurations {
  std::vector<double> x;
  std::vector<double> time_of_day;
  std::vector<long> day;
  std::size_t days = 0;
  std::size_t ties_collapsed = 0;
  double session_length = 23400.0;

  std::size_t size() const noexcept { return x.size(); }
  // Calendar span covered by the tape: days * session length.
  double t_span() const noexcept { return static_cast<double>(days) * session_length; }
};

// Differences of consecutive timestamps within each day. Equal timestamps are
// one event; overnight gaps never form durations. Throws Ingest (listing the
// offending rows) when timestamps decrease within a day or days go backwards.
RawDurations durations_from_tape(const TradeTape& tape);

}  // namespace acd
