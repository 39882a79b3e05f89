#include "acd/diurnal.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/io.hpp"
#include "acd/quadrature.hpp"

namespace acd {

namespace {

constexpr int kDegree = 3;
constexpr std::size_t kMinPerInterval = 10;

// Nonzero cubic B-splines at x (NURBS book, A2.2). Returns the index of the
// first nonzero basis function.
std::size_t basis_funs(const std::vector<double>& knots, double x, double out[kDegree + 1]) {
  const std::size_t nb = knots.size() - kDegree - 1;  // number of basis functions
  // Span s with knots[s] <= x < knots[s+1], clamped into [degree, nb - 1].
  std::size_t s = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin());
  s = s == 0 ? 0 : s - 1;
  s = std::clamp<std::size_t>(s, kDegree, nb - 1);
  double left[kDegree + 1], right[kDegree + 1];
  out[0] = 1.0;
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = x - knots[s + 1 - static_cast<std::size_t>(j)];
    right[j] = knots[s + static_cast<std::size_t>(j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
  return s - kDegree;
}

}  // namespace

std::vector<double> DiurnalModel::knot_vector() const {
  std::vector<double> k;
  for (int i = 0; i < kDegree; ++i) k.push_back(breaks_.front());
  k.insert(k.end(), breaks_.begin(), breaks_.end());
  for (int i = 0; i < kDegree; ++i) k.push_back(breaks_.back());
  return k;
}

Eigen::MatrixXd DiurnalModel::basis(const std::vector<double>& tod) const {
  const auto knots = knot_vector();
  const auto nb = static_cast<Eigen::Index>(knots.size() - kDegree - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tod.size()), nb);
  double vals[kDegree + 1];
  for (std::size_t i = 0; i < tod.size(); ++i) {
    const std::size_t first = basis_funs(knots, tod[i], vals);
    for (int j = 0; j <= kDegree; ++j) {
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(first) + j) = vals[j];
    }
  }
  return b;
}

double DiurnalModel::log_curve(double tod) const {
  const auto knots = knot_vector();
  double vals[kDegree + 1];
  const std::size_t first = basis_funs(knots, std::clamp(tod, breaks_.front(), breaks_.back()), vals);
  double s = 0.0;
  for (int j = 0; j <= kDegree; ++j) s += coef_[first + static_cast<std::size_t>(j)] * vals[j];
  return s;
}

double DiurnalModel::operator()(double tod) const { return std::exp(log_curve(tod)); }

double DiurnalModel::session_average() const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    total += integrate_interval([this](double u) { return (*this)(u); }, breaks_[k], breaks_[k + 1]).value;
  }
  return total / length_;
}

DiurnalModel DiurnalModel::flat(double session_length) {
  DiurnalModel m;
  m.length_ = session_length;
  m.breaks_ = {0.0, session_length};
  m.coef_.assign(kDegree + 1, 0.0);
  return m;
}

DiurnalModel DiurnalModel::fit(const RawDurations& raw, double knot_spacing) {
  if (!(knot_spacing > 0.0)) throw Error(ErrorKind::Config, "knot spacing must be positive");
  if (raw.size() < kDegree + 1) throw Error(ErrorKind::Config, "too few durations for a diurnal spline");
  DiurnalModel m;
  m.length_ = raw.session_length;
  const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m.length_ / knot_spacing - 1e-9)));
  for (std::size_t k = 0; k < intervals; ++k) m.breaks_.push_back(static_cast<double>(k) * knot_spacing);
  m.breaks_.push_back(m.length_);

  for (double s : raw.time_of_day) {
    if (s < 0.0 || s > m.length_) {
      throw Error(ErrorKind::Ingest, fmt::format("duration stamp {} outside the session [0, {}]", s, m.length_));
    }
  }

  // Widen sparse intervals by dropping the breakpoint shared with the sparser neighbour.
  for (;;) {
    const std::size_t ni = m.breaks_.size() - 1;
    if (ni == 1) break;
    std::vector<std::size_t> counts(ni, 0);
    for (double s : raw.time_of_day) {
      auto j = static_cast<std::size_t>(std::upper_bound(m.breaks_.begin(), m.breaks_.end(), s) - m.breaks_.begin());
      j = std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, ni - 1);
      ++counts[j];
    }
    const auto sparse = std::find_if(counts.begin(), counts.end(), [](std::size_t c) { return c < kMinPerInterval; });
    if (sparse == counts.end()) break;
    const auto j = static_cast<std::size_t>(sparse - counts.begin());
    std::size_t drop = 0;  // index of the breakpoint to remove
    if (j == 0) {
      drop = 1;
    } else if (j == ni - 1) {
      drop = ni - 1;
    } else {
      drop = counts[j - 1] <= counts[j + 1] ? j : j + 1;
    }
    m.warnings_.push_back(fmt::format("interval [{}, {}] has {} durations; merged with its neighbour",
                                      m.breaks_[j], m.breaks_[j + 1], counts[j]));
    m.breaks_.erase(m.breaks_.begin() + static_cast<std::ptrdiff_t>(drop));
  }

  const Eigen::MatrixXd b = m.basis(raw.time_of_day);
  Eigen::VectorXd y(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) y[static_cast<Eigen::Index>(i)] = std::log(raw.x[i]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
  if (qr.rank() < b.cols()) {
    throw Error(ErrorKind::Solver,
                fmt::format("diurnal spline design has rank {} < {}; use a wider knot spacing", qr.rank(), b.cols()));
  }
  const Eigen::VectorXd c = qr.solve(y);
  m.coef_.assign(c.data(), c.data() + c.size());

  // B-splines sum to one, so a constant shift of the coefficients rescales the curve.
  const double shift = std::log(m.session_average());
  for (double& v : m.coef_) v -= shift;
  return m;
}

nlohmann::json DiurnalModel::to_json() const {
  return {{"schema_version", 1},
          {"session_length", length_},
          {"degree", kDegree},
          {"breakpoints", breaks_},
          {"coefficients", coef_},
          {"warnings", warnings_}};
}

DiurnalModel DiurnalModel::from_json(const nlohmann::json& j) {
  try {
    DiurnalModel m;
    m.length_ = j.at("session_length").get<double>();
    m.breaks_ = j.at("breakpoints").get<std::vector<double>>();
    m.coef_ = j.at("coefficients").get<std::vector<double>>();
    if (j.contains("warnings")) m.warnings_ = j.at("warnings").get<std::vector<std::string>>();
    if (m.breaks_.size() < 2 || m.coef_.size() != m.breaks_.size() + kDegree - 1) {
      throw Error(ErrorKind::Ingest, "diurnal model: breakpoints and coefficients do not match");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Ingest, fmt::format("malformed diurnal model JSON: {}", e.what()));
  }
}

AdjustedSeries diurnal_adjust(const RawDurations& raw, const DiurnalModel& model, bool daily_reset) {
  if (raw.size() < 2) throw Error(ErrorKind::Config, "need at least two durations to adjust");
  AdjustedSeries out;
  out.series.t_span = raw.t_span();
  out.time_of_day = raw.time_of_day;
  out.day = raw.day;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double s = raw.time_of_day[i];
    if (s < 0.0 || s > model.session_length()) {
      throw Error(ErrorKind::Ingest, fmt::format("duration stamp {} outside the session", s));
    }
    const double adj = raw.x[i] / model(s);
    if (i == 0) {
      out.series.x0 = adj;
    } else {
      out.series.x.push_back(adj);
    }
  }
  if (daily_reset) out.series.resets = daily_resets(raw.day);
  return out;
}

}  // namespace acd
