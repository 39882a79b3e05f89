#include "acd/tape.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "acd/errors.hpp"

namespace acd {

void SessionSpec::validate() const {
  if (!(length > 0.0) || length > 86400.0) {
    throw Error(ErrorKind::Config, fmt::format("session length must be in (0, 86400], got {}", length));
  }
  if (open_seconds < 0 || open_seconds >= 86400) throw Error(ErrorKind::Config, "session open must be within a day");
}

SessionSpec session_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open session file '{}'", path));
  try {
    const auto j = nlohmann::json::parse(in);
    SessionSpec s;
    s.open_seconds = j.value("open_seconds", s.open_seconds);
    s.length = j.value("length_seconds", s.length);
    s.utc_offset_seconds = j.value("utc_offset_seconds", s.utc_offset_seconds);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, fmt::format("malformed session file '{}': {}", path, e.what()));
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

template <typename T>
bool parse(const std::string& s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TradeTape read_tape_csv(std::istream& in, const SessionSpec& session) {
  session.validate();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Ingest, "trade file is empty");
  const auto header = split(line);
  int col_day = -1, col_ts = -1, col_ns = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "day") col_day = static_cast<int>(k);
    if (header[k] == "timestamp_seconds") col_ts = static_cast<int>(k);
    if (header[k] == "epoch_ns") col_ns = static_cast<int>(k);
  }
  const bool relative = col_day >= 0 && col_ts >= 0;
  if (!relative && col_ns < 0) {
    throw Error(ErrorKind::Ingest, "trade header must contain 'day,timestamp_seconds' or 'epoch_ns'");
  }

  TradeTape tape;
  tape.session = session;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() < header.size()) {
      throw Error(ErrorKind::Ingest, fmt::format("trade row {}: expected {} fields", row, header.size()));
    }
    if (relative) {
      long d = 0;
      double ts = 0.0;
      if (!parse(cells[static_cast<std::size_t>(col_day)], d) || !parse(cells[static_cast<std::size_t>(col_ts)], ts)) {
        throw Error(ErrorKind::Ingest, fmt::format("trade row {}: cannot parse '{}'", row, line));
      }
      if (!(ts >= 0.0 && ts <= session.length)) {
        throw Error(ErrorKind::Ingest,
                    fmt::format("trade row {}: timestamp {} outside the session [0, {}]", row, ts, session.length));
      }
      tape.day.push_back(d);
      tape.time_of_day.push_back(ts);
    } else {
      std::int64_t ns = 0;
      if (!parse(cells[static_cast<std::size_t>(col_ns)], ns)) {
        throw Error(ErrorKind::Ingest, fmt::format("trade row {}: cannot parse epoch '{}'", row, line));
      }
      // Integer arithmetic keeps nanosecond precision before the split.
      constexpr std::int64_t kNs = 1000000000;
      const std::int64_t secs = floor_div(ns, kNs) + session.utc_offset_seconds;
      const std::int64_t frac_ns = ns - floor_div(ns, kNs) * kNs;
      const std::int64_t day = floor_div(secs, 86400);
      const std::int64_t sec_of_day = secs - day * 86400 - session.open_seconds;
      const double tod = static_cast<double>(sec_of_day) + static_cast<double>(frac_ns) * 1e-9;
      if (tod < 0.0 || tod > session.length) {
        ++tape.dropped_outside_session;
        continue;
      }
      tape.day.push_back(static_cast<long>(day));
      tape.time_of_day.push_back(tod);
    }
  }
  return tape;
}

TradeTape read_tape_csv(const std::string& path, const SessionSpec& session) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Ingest, fmt::format("cannot open '{}'", path));
  return read_tape_csv(in, session);
}

RawDurations durations_from_tape(const TradeTape& tape) {
  const std::size_t n = tape.size();
  if (tape.time_of_day.size() != n) throw Error(ErrorKind::Ingest, "tape columns have different lengths");

  std::vector<std::size_t> bad;
  for (std::size_t i = 1; i < n; ++i) {
    if (tape.day[i] < tape.day[i - 1] || (tape.day[i] == tape.day[i - 1] && tape.time_of_day[i] < tape.time_of_day[i - 1])) {
      bad.push_back(i);
    }
  }
  if (!bad.empty()) {
    std::string rows;
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 20); ++k) {
      rows += fmt::format("{}{}", k ? ", " : "", bad[k] + 1);
    }
    throw Error(ErrorKind::Ingest,
                fmt::format("timestamps are not monotone at {} record(s) (1-based): {}{}", bad.size(), rows,
                            bad.size() > 20 ? ", ..." : ""));
  }

  RawDurations out;
  out.session_length = tape.session.length;
  std::set<long> days(tape.day.begin(), tape.day.end());
  out.days = days.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (tape.day[i] != tape.day[i - 1]) continue;
    const double dx = tape.time_of_day[i] - tape.time_of_day[i - 1];
    if (dx == 0.0) {
      ++out.ties_collapsed;
      continue;
    }
    out.x.push_back(dx);
    out.time_of_day.push_back(tape.time_of_day[i]);
    out.day.push_back(tape.day[i]);
  }
  return out;
}

}  // namespace acd
