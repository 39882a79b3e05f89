// acdtool: simulate, fit, test, Monte Carlo and data preparation for ACD(1,1)
// duration models. Exit codes: 0 success, 2 usage/configuration, 3 numerical
// failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "acd/acf.hpp"
#include "acd/diurnal.hpp"
#include "acd/errors.hpp"
#include "acd/inference.hpp"
#include "acd/io.hpp"
#include "acd/likelihood.hpp"
#include "acd/montecarlo.hpp"
#include "acd/report_table.hpp"
#include "acd/simulator.hpp"
#include "acd/tape.hpp"
#include "acd/theory.hpp"
#include "acd/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;

struct Common {
  std::string out;
};

// --out wins, then ACD_OUT_DIR, then the working directory.
fs::path output_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    if (const char* env = std::getenv("ACD_OUT_DIR"); env != nullptr && *env != '\0') dir = env;
  }
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw acd::Error(acd::ErrorKind::Config, fmt::format("cannot create output directory '{}'", dir));
  return fs::path(dir);
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv,
                    json extra) {
  json m;
  m["schema_version"] = acd::kSchemaVersion;
  m["tool"] = "acdtool";
  m["version"] = acd::kVersion;
  m["command"] = command;
  m["argv"] = argv;
  for (auto& [k, v] : extra.items()) m[k] = v;
  acd::write_json_file((dir / "manifest.json").string(), m);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw acd::Error(acd::ErrorKind::Config, fmt::format("cannot parse {} '{}'", what, s));
  }
}

// "sigma2,median_n,alpha0;..."
std::vector<acd::DesignCell> parse_cells(const std::string& s) {
  std::vector<acd::DesignCell> cells;
  for (const auto& item : split(s, ';')) {
    const auto f = split(item, ',');
    if (f.size() != 3) {
      throw acd::Error(acd::ErrorKind::Config,
                       fmt::format("cell '{}' must have the form sigma2,median_n,alpha0", item));
    }
    const double n = parse_double(f[1], "median n");
    if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n))) {
      throw acd::Error(acd::ErrorKind::Config, fmt::format("median n '{}' is not a positive integer", f[1]));
    }
    cells.push_back({parse_double(f[0], "sigma2"), static_cast<std::size_t>(n), parse_double(f[2], "alpha0")});
  }
  return cells;
}

acd::FitOptions fit_options(const std::string& psi0, int starts) {
  acd::FitOptions o;
  o.psi0_rule = acd::psi0_rule_from_string(psi0);
  o.starts = starts;
  o.validate();
  return o;
}

acd::DurationSeries load_series(const std::string& path, double t_span, bool daily_reset) {
  auto file = acd::read_series_csv(path, t_span);
  if (daily_reset) {
    if (file.day.empty()) {
      throw acd::Error(acd::ErrorKind::Config, "--daily-reset needs a 'day' column in the series file");
    }
    file.series.resets = acd::daily_resets(file.day);
  }
  file.series.validate();
  return file.series;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  double omega = 1.0, alpha = 0.5, beta = 0.5, nu = 1.0, t = 0.0;
  std::string innov = "exp";
  int burn_in = 1000;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a, const Common& c, const std::vector<std::string>& argv) {
  acd::SimConfig cfg;
  cfg.theta0 = {a.omega, a.alpha, a.beta};
  if (a.innov == "exp") {
    cfg.innov = acd::InnovationSpec::exponential();
  } else {
    cfg.innov = acd::InnovationSpec::weibull(a.nu);
  }
  cfg.t_span = a.t;
  cfg.burn_in = a.burn_in;
  cfg.seed = a.seed;
  cfg.validate();
  const auto series = acd::simulate_span(cfg);
  const auto dir = output_dir(c);
  acd::write_series_csv((dir / "series.csv").string(), series);
  write_manifest(dir, "simulate", argv,
                 {{"seed", a.seed},
                  {"theta0", {{"omega", a.omega}, {"alpha", a.alpha}, {"beta", a.beta}}},
                  {"innovation", cfg.innov.str()},
                  {"t_span", a.t},
                  {"burn_in", a.burn_in},
                  {"n", series.n()},
                  {"outputs", {"series.csv"}}});
  std::cerr << fmt::format("simulated n = {} durations on [0, {}]\n", series.n(), a.t);
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string in, psi0 = "x0";
  double t = 0.0;
  int starts = 5;
  bool daily_reset = false;
};

int run_fit(const FitArgs& a, const Common& c, const std::vector<std::string>& argv) {
  const auto opts = fit_options(a.psi0, a.starts);
  const auto series = load_series(a.in, a.t, a.daily_reset);
  const auto fu = acd::fit_unrestricted(series, opts);
  const auto fr = acd::fit_restricted(series, opts);
  const auto dir = output_dir(c);
  acd::write_json_file((dir / "fit.json").string(), {{"schema_version", acd::kSchemaVersion},
                                                     {"unrestricted", acd::to_json(fu)},
                                                     {"restricted", acd::to_json(fr)}});
  write_manifest(dir, "fit", argv, {{"input", a.in}, {"outputs", {"fit.json"}}});
  std::cerr << fmt::format("unrestricted {} loglik {:.6f}\nrestricted   {} loglik {:.6f}\n",
                           fu.theta_hat.str(), fu.loglik, fr.theta_hat.str(), fr.loglik);
  return 0;
}

// -------------------------------------------------------------------- test

struct TestArgs {
  std::string fit, in, psi0 = "x0", sigma = "sandwich", label = "series";
  double t = 0.0, eta = 0.05;
  int omega_exp = 3, starts = 5;
  bool daily_reset = false;
};

int run_test(const TestArgs& a, const Common& c, const std::vector<std::string>& argv) {
  acd::FitResult fu, fr;
  if (!a.fit.empty()) {
    const auto j = acd::read_json_file(a.fit);
    if (!j.contains("unrestricted") || !j.contains("restricted")) {
      throw acd::Error(acd::ErrorKind::Ingest, "fit file must contain 'unrestricted' and 'restricted' fits");
    }
    fu = acd::fit_from_json(j.at("unrestricted"));
    fr = acd::fit_from_json(j.at("restricted"));
  } else if (!a.in.empty()) {
    const auto opts = fit_options(a.psi0, a.starts);
    const auto series = load_series(a.in, a.t, a.daily_reset);
    fu = acd::fit_unrestricted(series, opts);
    fr = acd::fit_restricted(series, opts);
  } else {
    throw acd::Error(acd::ErrorKind::Config, "test needs --fit or --in with --t");
  }
  const auto report = acd::build_report(fu, fr, acd::sigma_method_from_string(a.sigma), a.eta);
  std::cout << acd::format_table({acd::make_row(a.label, fu, report)}, a.omega_exp);
  auto verdict = [](bool r) { return r ? "reject" : "do not reject"; };
  std::cout << fmt::format("eta = {}\n", a.eta)
            << fmt::format("  alpha+beta = 1 vs != 1 (tau):  {} (p = {:.4f})\n", verdict(report.decisions.iacd_tau),
                           report.p_two_sided)
            << fmt::format("  alpha+beta = 1 vs != 1 (QLR):  {} (p = {:.4f})\n", verdict(report.decisions.iacd_qlr),
                           report.p_qlr)
            << fmt::format("  alpha+beta >= 1 vs < 1:        {} (p = {:.4f})\n",
                           verdict(report.decisions.infinite_mean), report.p_left)
            << fmt::format("  alpha+beta <= 1 vs > 1:        {} (p = {:.4f})\n",
                           verdict(report.decisions.finite_sum_leq1), report.p_right);
  const auto dir = output_dir(c);
  json rep = acd::to_json(report);
  rep["label"] = a.label;
  rep["theta"] = {{"omega", fu.theta_hat.omega}, {"alpha", fu.theta_hat.alpha}, {"beta", fu.theta_hat.beta}};
  acd::write_json_file((dir / "report.json").string(), rep);
  write_manifest(dir, "test", argv, {{"outputs", {"report.json"}}});
  return 0;
}

// ---------------------------------------------------------------------- mc

struct McArgs {
  std::string design = "table1", cells, c_values, psi0 = "x0", sigma = "sandwich";
  std::size_t m = 10000, pilot_reps = 1000;
  int workers = 1, grid_points = 100, starts = 5;
  std::uint64_t seed = 20250509;
  double eta = 0.05;
};

int run_mc(const McArgs& a, const Common& c, const std::vector<std::string>& argv) {
  acd::ExperimentDesign d;
  d.replications = a.m;
  d.master_seed = a.seed;
  d.eta = a.eta;
  d.pilot_reps = a.pilot_reps;
  d.grid_points = a.grid_points;
  d.fit = fit_options(a.psi0, a.starts);
  d.sigma_method = acd::sigma_method_from_string(a.sigma);
  if (!a.cells.empty()) d.explicit_cells = parse_cells(a.cells);
  for (const auto& v : split(a.c_values, ',')) d.c_values.push_back(parse_double(v, "c value"));
  if (a.design == "qq") {
    if (d.explicit_cells.empty()) d.explicit_cells = {{1.0, 62500, 0.5}};
    if (d.explicit_cells.size() != 1) throw acd::Error(acd::ErrorKind::Config, "the qq design takes exactly one cell");
  }
  d.validate();

  const auto dir = output_dir(c);
  acd::SpanCache cache;
  const auto size = acd::run_size_study(d, a.workers, cache);

  std::vector<acd::ErpRow> rows;
  for (const auto& r : size.rows) {
    const bool two_sided = r.sidedness == "two_sided";
    if (a.design == "table1" && !two_sided) continue;
    if (a.design == "table2" && two_sided) continue;
    rows.push_back(r);
  }
  std::vector<std::string> outputs;
  {
    std::ofstream f(dir / "erp_table.csv");
    acd::write_erp_csv(f, rows);
    outputs.emplace_back("erp_table.csv");
  }
  if (a.design == "power") {
    const auto power = acd::run_power_study(d, size, a.workers, cache);
    std::ofstream f(dir / "power_curve.csv");
    acd::write_power_csv(f, power);
    outputs.emplace_back("power_curve.csv");
  }
  if (a.design == "qq") {
    std::ofstream f(dir / "qq.csv");
    acd::write_qq_csv(f, acd::qq_data(size.samples.front().tau));
    outputs.emplace_back("qq.csv");
  }

  json spans = json::array();
  for (const auto& [cell, cal] : cache.entries()) {
    spans.push_back({{"sigma2", cell.sigma2},
                     {"med_n", cell.median_n},
                     {"alpha0", cell.alpha0},
                     {"t_span", cal.t_span},
                     {"achieved_median", cal.achieved_median}});
  }
  json cells = json::array();
  for (const auto& s : size.samples) {
    cells.push_back({{"sigma2", s.cell.sigma2},
                     {"med_n", s.cell.median_n},
                     {"alpha0", s.cell.alpha0},
                     {"failures", s.failures},
                     {"ks_distance", acd::ks_distance_normal(s.tau)}});
  }
  write_manifest(dir, "mc", argv,
                 {{"design_name", a.design},
                  {"design", acd::design_to_json(d)},
                  {"seed", a.seed},
                  {"spans", spans},
                  {"cells", cells},
                  {"outputs", outputs}});
  for (const auto& r : rows) {
    std::cerr << fmt::format("sigma2={} med_n={} alpha0={} {} {}: erp={:.3f} (se {:.3f})\n", r.sigma2, r.median_n,
                             r.alpha0, r.statistic, r.sidedness, r.erp, r.mc_se);
  }
  return 0;
}

// ------------------------------------------------------------------ adjust

struct AdjustArgs {
  std::string in, session;
  double knots = 1800.0;
  bool daily_reset = false;
};

int run_adjust(const AdjustArgs& a, const Common& c, const std::vector<std::string>& argv) {
  acd::SessionSpec session;
  if (!a.session.empty()) session = acd::session_from_json_file(a.session);
  const auto tape = acd::read_tape_csv(a.in, session);
  const auto raw = acd::durations_from_tape(tape);
  const auto model = acd::DiurnalModel::fit(raw, a.knots);
  const auto adj = acd::diurnal_adjust(raw, model, a.daily_reset);
  for (const auto& w : model.warnings()) std::cerr << "warning: " << w << '\n';

  const auto dir = output_dir(c);
  {
    std::ofstream f(dir / "adjusted.csv");
    f << "i,x,time_of_day,day\n";
    for (std::size_t i = 0; i <= adj.series.n(); ++i) {
      const double x = i == 0 ? adj.series.x0 : adj.series.x[i - 1];
      f << i << ',' << acd::format_g17(x) << ',' << acd::format_g17(adj.time_of_day[i]) << ',' << adj.day[i] << '\n';
    }
  }
  json dj = model.to_json();
  dj["t_span"] = adj.series.t_span;
  dj["days"] = raw.days;
  dj["ties_collapsed"] = raw.ties_collapsed;
  dj["dropped_outside_session"] = tape.dropped_outside_session;
  acd::write_json_file((dir / "diurnal.json").string(), dj);
  write_manifest(dir, "adjust", argv,
                 {{"input", a.in}, {"t_span", adj.series.t_span}, {"outputs", {"adjusted.csv", "diurnal.json"}}});
  std::cerr << fmt::format("{} days, {} durations ({} ties collapsed); t_span = {}\n", raw.days, adj.series.n() + 1,
                           raw.ties_collapsed, acd::format_g17(adj.series.t_span));
  return 0;
}

// --------------------------------------------------------------------- acf

struct AcfArgs {
  std::string fit, in;
  std::size_t max_lag = 50;
  double level = 0.95;
  bool squared = false;
};

int run_acf(const AcfArgs& a, const Common& c, const std::vector<std::string>& argv) {
  std::vector<double> values;
  if (!a.fit.empty()) {
    const auto j = acd::read_json_file(a.fit);
    const auto fit = acd::fit_from_json(j.contains("unrestricted") ? j.at("unrestricted") : j);
    if (fit.residuals.empty()) throw acd::Error(acd::ErrorKind::Ingest, "fit file carries no residuals");
    values = fit.residuals;
  } else if (!a.in.empty()) {
    values = acd::read_series_csv(a.in, 1.0).series.x;
  } else {
    throw acd::Error(acd::ErrorKind::Config, "acf needs --fit or --in");
  }
  if (a.squared) {
    for (double& v : values) v *= v;
  }
  const auto r = acd::acf(values, a.max_lag, a.level);
  const auto dir = output_dir(c);
  {
    std::ofstream f(dir / "acf.csv");
    f << "lag,rho,band\n";
    for (std::size_t k = 0; k < r.rho.size(); ++k) {
      f << (k + 1) << ',' << acd::format_g17(r.rho[k]) << ',' << acd::format_g17(r.band) << '\n';
    }
  }
  write_manifest(dir, "acf", argv, {{"outputs", {"acf.csv"}}});
  std::cout << fmt::format("{} of {} lags outside +/-{:.5f}\n", r.outside_band(), r.rho.size(), r.band);
  return 0;
}

int dispatch(int argc, char** argv);

// ------------------------------------------------------------------- rerun

int run_rerun(const std::string& manifest_path, const Common& c) {
  const auto m = acd::read_json_file(manifest_path);
  if (!m.contains("argv") || !m.at("argv").is_array()) {
    throw acd::Error(acd::ErrorKind::Ingest, "manifest has no argv");
  }
  auto args = m.at("argv").get<std::vector<std::string>>();
  if (!c.out.empty()) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out" && i + 1 < args.size()) {
        ++i;
      } else if (args[i].rfind("--out=", 0) != 0) {
        kept.push_back(args[i]);
      }
    }
    kept.push_back("--out");
    kept.push_back(c.out);
    args = kept;
  }
  std::vector<char*> ptrs;
  std::string prog = "acdtool";
  ptrs.push_back(prog.data());
  for (auto& s : args) ptrs.push_back(s.data());
  return dispatch(static_cast<int>(ptrs.size()), ptrs.data());
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Estimation and testing for ACD(1,1) duration models at the integrated boundary"};
  app.set_version_flag("--version", std::string(acd::kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> args(argv + 1, argv + argc);

  Common common;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Output directory (default: $ACD_OUT_DIR or .)");
  };

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate durations on [0, t]");
  sim->add_option("--omega", sa.omega, "omega")->capture_default_str();
  sim->add_option("--alpha", sa.alpha, "alpha")->capture_default_str();
  sim->add_option("--beta", sa.beta, "beta")->capture_default_str();
  sim->add_option("--innov", sa.innov, "Innovation law")->check(CLI::IsMember({"exp", "weibull"}))->capture_default_str();
  sim->add_option("--nu", sa.nu, "Weibull shape")->capture_default_str();
  sim->add_option("--t", sa.t, "Time span")->required();
  sim->add_option("--burn-in", sa.burn_in, "Burn-in length")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Seed")->capture_default_str();
  add_out(sim);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Unrestricted and restricted QMLE");
  fit->add_option("--in", fa.in, "Series CSV (i,x)")->required();
  fit->add_option("--t", fa.t, "Time span")->required();
  fit->add_option("--psi0", fa.psi0, "Initial psi: x0 or omega")->check(CLI::IsMember({"x0", "omega"}))->capture_default_str();
  fit->add_option("--starts", fa.starts, "Starting points (1-5)")->capture_default_str();
  fit->add_flag("--daily-reset", fa.daily_reset, "Restart the filter at each new day (needs a day column)");
  add_out(fit);

  TestArgs ta;
  auto* test = app.add_subcommand("test", "IACD and infinite-mean tests");
  test->add_option("--fit", ta.fit, "fit.json from the fit command");
  test->add_option("--in", ta.in, "Series CSV (fits first)");
  test->add_option("--t", ta.t, "Time span (with --in)");
  test->add_option("--psi0", ta.psi0, "Initial psi: x0 or omega")->check(CLI::IsMember({"x0", "omega"}))->capture_default_str();
  test->add_option("--starts", ta.starts, "Starting points (1-5)")->capture_default_str();
  test->add_flag("--daily-reset", ta.daily_reset, "Restart the filter at each new day");
  test->add_option("--eta", ta.eta, "Nominal level")->capture_default_str();
  test->add_option("--sigma", ta.sigma, "Variance estimator")->check(CLI::IsMember({"sandwich", "info"}))->capture_default_str();
  test->add_option("--omega-exp", ta.omega_exp, "Display omega times 10^k")->capture_default_str();
  test->add_option("--label", ta.label, "Row label")->capture_default_str();
  add_out(test);
  test->get_option("--fit")->excludes(test->get_option("--in"));
  test->get_option("--in")->needs(test->get_option("--t"));

  McArgs ma;
  auto* mc = app.add_subcommand("mc", "Monte Carlo size, power and QQ experiments");
  mc->add_option("--design", ma.design, "table1|table2|power|qq")
      ->check(CLI::IsMember({"table1", "table2", "power", "qq"}))
      ->capture_default_str();
  mc->add_option("--M", ma.m, "Replications per cell")->capture_default_str();
  mc->add_option("--cells", ma.cells, "Cells 'sigma2,median_n,alpha0;...' (default: full grid)");
  mc->add_option("--workers", ma.workers, "Worker threads")->capture_default_str();
  mc->add_option("--seed", ma.seed, "Master seed")->capture_default_str();
  mc->add_option("--eta", ma.eta, "Nominal level")->capture_default_str();
  mc->add_option("--c-values", ma.c_values, "Explicit alternatives c, comma separated");
  mc->add_option("--grid-points", ma.grid_points, "Points of the c grid")->capture_default_str();
  mc->add_option("--pilot-reps", ma.pilot_reps, "Pilot paths for span calibration")->capture_default_str();
  mc->add_option("--starts", ma.starts, "Fit starting points (1-5)")->capture_default_str();
  mc->add_option("--psi0", ma.psi0, "Initial psi: x0 or omega")->check(CLI::IsMember({"x0", "omega"}))->capture_default_str();
  mc->add_option("--sigma", ma.sigma, "Variance estimator")->check(CLI::IsMember({"sandwich", "info"}))->capture_default_str();
  add_out(mc);

  AdjustArgs aa;
  auto* adjust = app.add_subcommand("adjust", "Durations from a trade tape, diurnally adjusted");
  adjust->add_option("--in", aa.in, "Trade CSV (day,timestamp_seconds or epoch_ns)")->required();
  adjust->add_option("--session", aa.session, "Session JSON (open_seconds, length_seconds, utc_offset_seconds)");
  adjust->add_option("--knots", aa.knots, "Knot spacing in seconds")->capture_default_str();
  adjust->add_flag("--daily-reset", aa.daily_reset, "Mark day boundaries as filter restarts");
  add_out(adjust);

  AcfArgs ca;
  auto* acf = app.add_subcommand("acf", "Sample autocorrelations of residuals or durations");
  acf->add_option("--fit", ca.fit, "fit.json (unrestricted residuals)");
  acf->add_option("--in", ca.in, "Series CSV");
  acf->add_option("--max-lag", ca.max_lag, "Largest lag")->capture_default_str();
  acf->add_option("--level", ca.level, "Band coverage")->capture_default_str();
  acf->add_flag("--squared", ca.squared, "Use squared values");
  add_out(acf);
  acf->get_option("--fit")->excludes(acf->get_option("--in"));

  std::string manifest;
  auto* rerun = app.add_subcommand("rerun", "Replay a run from its manifest");
  rerun->add_option("--manifest", manifest, "manifest.json")->required();
  add_out(rerun);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (sim->parsed()) return run_simulate(sa, common, args);
  if (fit->parsed()) return run_fit(fa, common, args);
  if (test->parsed()) return run_test(ta, common, args);
  if (mc->parsed()) return run_mc(ma, common, args);
  if (adjust->parsed()) return run_adjust(aa, common, args);
  if (acf->parsed()) return run_acf(ca, common, args);
  if (rerun->parsed()) return run_rerun(manifest, common);
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const acd::Error& e) {
    std::cerr << "error (" << acd::to_string(e.kind()) << "): " << e.what() << '\n';
    return acd::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
