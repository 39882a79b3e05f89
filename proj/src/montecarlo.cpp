#include "acd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "acd/errors.hpp"
#include "acd/io.hpp"
#include "acd/normal.hpp"
#include "acd/parallel.hpp"
#include "acd/theory.hpp"

namespace acd {

std::vector<DesignCell> ExperimentDesign::cells() const {
  if (!explicit_cells.empty()) return explicit_cells;
  std::vector<DesignCell> out;
  for (double s2 : sigma2)
    for (std::size_t m : median_n)
      for (double a : alpha0) out.push_back({s2, m, a});
  return out;
}

std::vector<double> ExperimentDesign::c_grid(double a0) const {
  if (!c_values.empty()) return c_values;
  const auto it = c_bound.find(a0);
  if (it == c_bound.end()) {
    throw Error(ErrorKind::Config, fmt::format("no power interval configured for alpha0 = {}", a0));
  }
  const double c = it->second;
  std::vector<double> grid;
  if (grid_points == 1) return {0.0};
  for (int k = 0; k < grid_points; ++k) {
    grid.push_back(-c + 2.0 * c * static_cast<double>(k) / static_cast<double>(grid_points - 1));
  }
  return grid;
}

InnovationSpec ExperimentDesign::innovation(double s2) const {
  if (s2 == 1.0) return InnovationSpec::exponential();
  return InnovationSpec::weibull(weibull_shape_for_variance(s2));
}

void ExperimentDesign::validate() const {
  fit.validate();
  if (replications < 1) throw Error(ErrorKind::Config, "replications must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::Config, "eta must lie in (0, 1)");
  if (!(omega0 > 0.0)) throw Error(ErrorKind::Config, "omega0 must be positive");
  if (!(failure_budget >= 0.0 && failure_budget < 1.0)) throw Error(ErrorKind::Config, "failure budget must be in [0, 1)");
  if (max_attempts < 1) throw Error(ErrorKind::Config, "max attempts must be positive");
  for (const auto& cell : cells()) {
    if (!(cell.alpha0 > 0.0 && cell.alpha0 < 1.0)) {
      throw Error(ErrorKind::Config, fmt::format("alpha0 = {} outside (0, 1)", cell.alpha0));
    }
    if (!(cell.sigma2 > 0.0)) throw Error(ErrorKind::Config, "sigma2 must be positive");
    if (cell.median_n < 1) throw Error(ErrorKind::Config, "median n must be positive");
  }
}

namespace {

std::uint64_t cell_key(const DesignCell& cell, double c) {
  std::uint64_t k = hash_double(0xACDULL, cell.sigma2);
  k = hash_combine(k, cell.median_n);
  k = hash_double(k, cell.alpha0);
  return hash_double(k, c);
}

}  // namespace

const CalibrationResult& SpanCache::get(const ExperimentDesign& design, const DesignCell& cell) {
  auto it = spans_.find(cell);
  if (it != spans_.end()) return it->second;
  const ParamTheta theta0{design.omega0, cell.alpha0, 1.0 - cell.alpha0};
  const std::uint64_t seed = hash_combine(design.master_seed, cell_key(cell, 0.0) ^ 0xCA1ULL);
  const auto r =
      calibrate_span(theta0, design.innovation(cell.sigma2), cell.median_n, design.pilot_reps, seed, design.burn_in);
  return spans_.emplace(cell, r).first->second;
}

CellSamples run_cell(const ExperimentDesign& design, const DesignCell& cell, double c, double t_span, int workers) {
  const std::size_t m = design.replications;
  CellSamples out;
  out.cell = cell;
  out.c = c;
  out.t_span = t_span;
  out.tau.assign(m, 0.0);
  out.qlr.assign(m, 0.0);
  out.qlr_normalized.assign(m, 0.0);
  out.n.assign(m, 0);

  SimConfig sim;
  sim.theta0 = {design.omega0, cell.alpha0 + c, 1.0 - cell.alpha0};
  sim.innov = design.innovation(cell.sigma2);
  sim.t_span = t_span;
  sim.burn_in = design.burn_in;
  sim.validate();

  const std::uint64_t key = cell_key(cell, c);
  std::vector<std::vector<std::string>> logs(m);

  parallel_for(m, workers, [&](std::size_t r) {
    for (int attempt = 0; attempt < design.max_attempts; ++attempt) {
      Rng rng = Rng::stream(design.master_seed, key, r, static_cast<std::uint64_t>(attempt));
      try {
        const auto series = simulate_span(sim, rng);
        const auto fu = fit_unrestricted(series, design.fit);
        const auto fr = fit_restricted(series, design.fit);
        const auto sig = sigma_hat(fu, design.sigma_method);
        out.tau[r] = tau_stat(fu, sig);
        out.qlr[r] = qlr_stat(fu, fr, false);
        out.qlr_normalized[r] = qlr_stat(fu, fr, true);
        out.n[r] = series.n();
        return;
      } catch (const Error& e) {
        logs[r].push_back(fmt::format("replication {} attempt {}: [{}] {}", r, attempt, to_string(e.kind()), e.what()));
      }
    }
  });

  for (auto& l : logs) {
    out.failures += l.size();
    for (auto& msg : l) out.failure_log.push_back(std::move(msg));
  }
  const auto budget = static_cast<std::size_t>(std::floor(design.failure_budget * static_cast<double>(m)));
  const bool exhausted = std::any_of(logs.begin(), logs.end(), [&](const auto& l) {
    return l.size() >= static_cast<std::size_t>(design.max_attempts);
  });
  if (out.failures > budget || exhausted) {
    throw Error(ErrorKind::NonConvergence,
                fmt::format("cell (sigma2={}, med n={}, alpha0={}, c={}) exceeded its failure budget: {} failures "
                            "(budget {}); first: {}",
                            cell.sigma2, cell.median_n, cell.alpha0, c, out.failures, budget,
                            out.failure_log.empty() ? "" : out.failure_log.front()));
  }
  return out;
}

std::vector<ErpRow> erp_rows(const CellSamples& s, double eta) {
  const double m = static_cast<double>(s.tau.size());
  const double z2 = normal_quantile(1.0 - 0.5 * eta);
  const double z1 = normal_quantile(1.0 - eta);
  const double chi = chi2_1_upper_quantile(eta);
  auto frac = [&](auto pred) {
    std::size_t k = 0;
    for (std::size_t r = 0; r < s.tau.size(); ++r) k += pred(r) ? 1 : 0;
    return static_cast<double>(k) / m;
  };
  auto row = [&](const char* stat, const char* side, double erp) {
    return ErpRow{s.cell.sigma2, s.cell.median_n, s.cell.alpha0, stat, side, erp, std::sqrt(erp * (1.0 - erp) / m)};
  };
  return {
      row("tau", "two_sided", frac([&](std::size_t r) { return std::abs(s.tau[r]) > z2; })),
      row("qlr", "two_sided", frac([&](std::size_t r) { return s.qlr_normalized[r] > chi; })),
      row("tau", "left", frac([&](std::size_t r) { return s.tau[r] < -z1; })),
      row("tau", "right", frac([&](std::size_t r) { return s.tau[r] > z1; })),
  };
}

SizeStudyResult run_size_study(const ExperimentDesign& design, int workers, SpanCache& cache) {
  design.validate();
  SizeStudyResult res;
  for (const auto& cell : design.cells()) {
    const double t = cache.get(design, cell).t_span;
    auto samples = run_cell(design, cell, 0.0, t, workers);
    for (auto& row : erp_rows(samples, design.eta)) res.rows.push_back(std::move(row));
    res.samples.push_back(std::move(samples));
  }
  return res;
}

std::vector<PowerPoint> run_power_study(const ExperimentDesign& design, const SizeStudyResult& null_study,
                                        int workers, SpanCache& cache) {
  design.validate();
  std::vector<PowerPoint> out;
  for (const auto& cell : design.cells()) {
    const auto null_it = std::find_if(null_study.samples.begin(), null_study.samples.end(),
                                      [&](const CellSamples& s) { return s.cell == cell && s.c == 0.0; });
    if (null_it == null_study.samples.end()) {
      throw Error(ErrorKind::Config, fmt::format("no null samples for cell (sigma2={}, med n={}, alpha0={})",
                                                 cell.sigma2, cell.median_n, cell.alpha0));
    }
    const double q_left = empirical_quantile(null_it->tau, design.eta);
    const double q_right = empirical_quantile(null_it->tau, 1.0 - design.eta);
    const double t = cache.get(design, cell).t_span;
    for (double c : design.c_grid(cell.alpha0)) {
      const CellSamples* samples = &*null_it;
      CellSamples alt;
      if (c != 0.0) {
        alt = run_cell(design, cell, c, t, workers);
        samples = &alt;
      }
      const double m = static_cast<double>(samples->tau.size());
      const auto left = std::count_if(samples->tau.begin(), samples->tau.end(), [&](double v) { return v < q_left; });
      const auto right = std::count_if(samples->tau.begin(), samples->tau.end(), [&](double v) { return v > q_right; });
      out.push_back({cell.sigma2, cell.alpha0, cell.median_n, c, "left", static_cast<double>(left) / m});
      out.push_back({cell.sigma2, cell.alpha0, cell.median_n, c, "right", static_cast<double>(right) / m});
    }
  }
  return out;
}

double empirical_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw Error(ErrorKind::Config, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<std::pair<double, double>> qq_data(std::vector<double> v) {
  if (v.size() < 100) {
    throw Error(ErrorKind::Config, fmt::format("QQ data needs at least 100 samples, got {}", v.size()));
  }
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / m), v[i]);
  }
  return out;
}

double ks_distance_normal(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::Config, "KS distance of an empty sample");
  std::sort(v.begin(), v.end());
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

void write_erp_csv(std::ostream& out, const std::vector<ErpRow>& rows) {
  out << "sigma2,med_n,alpha0,statistic,sidedness,erp,mc_se\n";
  for (const auto& r : rows) {
    out << format_g17(r.sigma2) << ',' << r.median_n << ',' << format_g17(r.alpha0) << ',' << r.statistic << ','
        << r.sidedness << ',' << format_g17(r.erp) << ',' << format_g17(r.mc_se) << '\n';
  }
}

void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points) {
  out << "alpha0,med_n,c,side,erp\n";
  for (const auto& p : points) {
    out << format_g17(p.alpha0) << ',' << p.median_n << ',' << format_g17(p.c) << ',' << p.side << ','
        << format_g17(p.erp) << '\n';
  }
}

void write_qq_csv(std::ostream& out, const std::vector<std::pair<double, double>>& qq) {
  out << "theoretical,empirical\n";
  for (const auto& [a, b] : qq) out << format_g17(a) << ',' << format_g17(b) << '\n';
}

nlohmann::json design_to_json(const ExperimentDesign& d) {
  nlohmann::json j;
  auto cells = nlohmann::json::array();
  for (const auto& c : d.cells()) cells.push_back({{"sigma2", c.sigma2}, {"med_n", c.median_n}, {"alpha0", c.alpha0}});
  j["cells"] = cells;
  j["replications"] = d.replications;
  j["eta"] = d.eta;
  j["omega0"] = d.omega0;
  j["pilot_reps"] = d.pilot_reps;
  j["burn_in"] = d.burn_in;
  j["master_seed"] = d.master_seed;
  j["failure_budget"] = d.failure_budget;
  j["max_attempts"] = d.max_attempts;
  j["fit_starts"] = d.fit.starts;
  j["psi0_rule"] = to_string(d.fit.psi0_rule);
  j["sigma_method"] = to_string(d.sigma_method);
  auto cb = nlohmann::json::object();
  for (const auto& [a, c] : d.c_bound) cb[format_g17(a)] = c;
  j["c_bound"] = cb;
  j["grid_points"] = d.grid_points;
  j["c_values"] = d.c_values;
  return j;
}

}  // namespace acd
