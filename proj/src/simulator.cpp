#include "acd/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/theory.hpp"

namespace acd {

void SimConfig::validate() const {
  if (!(t_span > 0.0) || !std::isfinite(t_span)) {
    throw Error(ErrorKind::Config, fmt::format("span length must be positive, got {}", t_span));
  }
  if (burn_in < 0) throw Error(ErrorKind::Config, "burn-in must be non-negative");
  if (!theta0.admissible()) {
    throw Error(ErrorKind::Domain, fmt::format("inadmissible parameters {}", theta0.str()));
  }
  const double drift = stationarity_functional(theta0.alpha, theta0.beta, innov);
  if (!(drift < 0.0)) {
    throw Error(ErrorKind::Domain,
                fmt::format("parameters {} are not strictly stationary under {} (E[log(alpha eps + beta)] = {:.6g})",
                            theta0.str(), innov.str(), drift));
  }
}

namespace {

struct Recursion {
  const ParamTheta& theta;
  const InnovationSpec& innov;
  Rng& rng;
  double x_prev = 0.0;
  double psi_prev = 0.0;

  double next() {
    const double psi = theta.omega + theta.alpha * x_prev + theta.beta * psi_prev;
    const double x = psi * innov.sample(rng);
    x_prev = x;
    psi_prev = psi;
    return x;
  }

  // Runs the burn-in (at least one step, so x0 always exists) and returns x0.
  double burn(int burn_in) {
    double x0 = 0.0;
    for (int i = 0; i < std::max(burn_in, 1); ++i) x0 = next();
    return x0;
  }
};

}  // namespace

DurationSeries simulate_span(const SimConfig& cfg) {
  Rng rng(cfg.seed);
  return simulate_span(cfg, rng);
}

DurationSeries simulate_span(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  Recursion rec{cfg.theta0, cfg.innov, rng};
  DurationSeries out;
  out.t_span = cfg.t_span;
  out.x0 = rec.burn(cfg.burn_in);
  double sum = 0.0;
  for (;;) {
    const double x = rec.next();
    if (sum + x > cfg.t_span) break;
    sum += x;
    out.x.push_back(x);
  }
  if (out.x.empty()) {
    throw Error(ErrorKind::EmptySeries, fmt::format("no event inside the span [0, {}]", cfg.t_span));
  }
  return out;
}

DurationSeries simulate_count(const ParamTheta& theta0, const InnovationSpec& innov, int burn_in,
                              std::size_t count, Rng& rng) {
  Recursion rec{theta0, innov, rng};
  DurationSeries out;
  out.x0 = rec.burn(burn_in);
  out.x.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.x.push_back(rec.next());
  out.t_span = out.total();
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double upper = v[m];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lower + upper);
}

CalibrationResult calibrate_span(const ParamTheta& theta0, const InnovationSpec& innov,
                                 std::size_t target_median_n, std::size_t pilot_reps, std::uint64_t seed,
                                 int burn_in) {
  if (target_median_n < 1) throw Error(ErrorKind::Config, "target median must be at least 1");
  if (pilot_reps < 200) throw Error(ErrorKind::Config, "calibration needs at least 200 pilot replications");
  SimConfig probe;
  probe.theta0 = theta0;
  probe.innov = innov;
  probe.burn_in = burn_in;
  probe.validate();

  // Pilot paths under common random numbers: n_r(t) is the number of partial
  // sums below t, which is nondecreasing in t on every path. Paths are long
  // enough to resolve n(t) well past the target.
  const std::size_t horizon = 2 * target_median_n + 20;
  std::vector<std::vector<double>> cumsums(pilot_reps);
  for (std::size_t r = 0; r < pilot_reps; ++r) {
    Rng rng = Rng::stream(seed, 0xCA11B, r);
    const auto path = simulate_count(theta0, innov, burn_in, horizon, rng);
    auto& cs = cumsums[r];
    cs.resize(horizon);
    double s = 0.0;
    for (std::size_t i = 0; i < horizon; ++i) {
      s += path.x[i];
      cs[i] = s;
    }
  }

  auto median_n = [&](double t) {
    std::vector<double> counts(pilot_reps);
    for (std::size_t r = 0; r < pilot_reps; ++r) {
      const auto& cs = cumsums[r];
      counts[r] = static_cast<double>(std::upper_bound(cs.begin(), cs.end(), t) - cs.begin());
    }
    return median(std::move(counts));
  };

  const auto target = static_cast<double>(target_median_n);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& cs : cumsums) hi = std::max(hi, cs[target_median_n - 1]);
  if (!(median_n(hi) >= target)) {
    throw Error(ErrorKind::Calibration,
                fmt::format("calibration bracket failed: median n at t={} is {}", hi, median_n(hi)));
  }

  // Smallest t with median n(t) >= target.
  CalibrationResult res;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    res.iterations = it + 1;
    const double mid = 0.5 * (lo + hi);
    if (median_n(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  res.t_span = hi;
  res.achieved_median = median_n(hi);
  if (std::abs(res.achieved_median - target) > 0.02 * target) {
    throw Error(ErrorKind::Calibration,
                fmt::format("calibration for median {} ended at t={} with pilot median {} (below t: {})", target,
                            hi, res.achieved_median, median_n(lo)));
  }
  return res;
}

}  // namespace acd
