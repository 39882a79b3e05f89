#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "acd/inference.hpp"
#include "acd/innovation.hpp"
#include "acd/likelihood.hpp"
#include "acd/simulator.hpp"

namespace acd {

// One design point of the null experiments: innovation variance, calibrated
// median event count and alpha0 (beta0 = 1 - alpha0).
struct DesignCell {
  double sigma2 = 1.0;
  std::size_t median_n = 2500;
  double alpha0 = 0.5;

  bool operator<(const DesignCell& o) const {
    return std::tie(sigma2, median_n, alpha0) < std::tie(o.sigma2, o.median_n, o.alpha0);
  }
  bool operator==(const DesignCell& o) const {
    return sigma2 == o.sigma2 && median_n == o.median_n && alpha0 == o.alpha0;
  }
};

struct ExperimentDesign {
  std::vector<double> alpha0{0.15, 0.50, 0.85};
  std::vector<double> sigma2{0.5, 1.0, 2.0};
  std::vector<std::size_t> median_n{100, 500, 2500, 12500, 62500};
  // Explicit subset of cells; when empty the full grid above is used.
  std::vector<DesignCell> explicit_cells;

  std::size_t replications = 10000;
  double eta = 0.05;
  double omega0 = 1.0;
  std::size_t pilot_reps = 1000;
  int burn_in = 1000;
  std::uint64_t master_seed = 20250509;
  double failure_budget = 0.01;  // fraction of M that may be resampled
  int max_attempts = 10;         // sub-streams tried per replication
  FitOptions fit{};
  SigmaMethod sigma_method = SigmaMethod::Sandwich;

  // Power design: alpha = alpha0 + c, beta = 1 - alpha0 with c on an
  // equidistant grid of `grid_points` over [-c(alpha0), c(alpha0)], unless
  // explicit c values are given.
  std::map<double, double> c_bound{{0.15, 0.011}, {0.50, 0.128}, {0.85, 0.149}};
  int grid_points = 100;
  std::vector<double> c_values;

  std::vector<DesignCell> cells() const;
  std::vector<double> c_grid(double alpha0) const;
  InnovationSpec innovation(double sigma2) const;
  // Throws Config on inconsistent settings. Stationarity of power grid points
  // is checked when their cells are simulated.
  void validate() const;
};

// Calibrated spans keyed by (alpha0, sigma2, median_n) at c = 0.
class SpanCache {
 public:
  const CalibrationResult& get(const ExperimentDesign& design, const DesignCell& cell);
  const std::map<DesignCell, CalibrationResult>& entries() const { return spans_; }
  void put(const DesignCell& cell, const CalibrationResult& r) { spans_[cell] = r; }

 private:
  std::map<DesignCell, CalibrationResult> spans_;
};

// Raw statistics of every replication of one cell, in replication order.
struct CellSamples {
  DesignCell cell;
  double c = 0.0;
  double t_span = 0.0;
  std::vector<double> tau;
  std::vector<double> qlr;             // raw
  std::vector<double> qlr_normalized;  // divided by sigma2_eps_hat
  std::vector<std::size_t> n;
  std::size_t failures = 0;
  std::vector<std::string> failure_log;
};

struct ErpRow {
  double sigma2 = 0.0;
  std::size_t median_n = 0;
  double alpha0 = 0.0;
  std::string statistic;   // "tau" or "qlr"
  std::string sidedness;   // "two_sided", "left", "right"
  double erp = 0.0;
  double mc_se = 0.0;
};

struct SizeStudyResult {
  std::vector<ErpRow> rows;
  std::vector<CellSamples> samples;
};

// M replications of simulate -> unrestricted fit -> restricted fit -> tau,
// QLR for one cell at the given span and alternative c (0 under the null).
CellSamples run_cell(const ExperimentDesign& design, const DesignCell& cell, double c, double t_span,
                     int workers);

// Size study over design.cells(); spans are calibrated on demand into `cache`.
SizeStudyResult run_size_study(const ExperimentDesign& design, int workers, SpanCache& cache);

// Rejection rows for one cell: tau two-sided, normalized QLR, tau < -q, tau > q.
std::vector<ErpRow> erp_rows(const CellSamples& samples, double eta);

struct PowerPoint {
  double sigma2 = 0.0;
  double alpha0 = 0.0;
  std::size_t median_n = 0;
  double c = 0.0;
  std::string side;  // "left" (tau < q_L) or "right" (tau > q_R)
  double erp = 0.0;
};

// Size-adjusted power: critical values are the eta and 1 - eta empirical
// quantiles of tau under c = 0 taken from `null_study`, spans are those of the
// c = 0 calibration.
std::vector<PowerPoint> run_power_study(const ExperimentDesign& design, const SizeStudyResult& null_study,
                                        int workers, SpanCache& cache);

// Linear-interpolation (type 7) sample quantile.
double empirical_quantile(std::vector<double> samples, double p);

// (N(0,1) quantile at (i - 0.5)/M, i-th order statistic). Needs >= 100 samples.
std::vector<std::pair<double, double>> qq_data(std::vector<double> samples);

// Kolmogorov-Smirnov distance between the sample and N(0, 1).
double ks_distance_normal(std::vector<double> samples);

void write_erp_csv(std::ostream& out, const std::vector<ErpRow>& rows);
void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points);
void write_qq_csv(std::ostream& out, const std::vector<std::pair<double, double>>& qq);

nlohmann::json design_to_json(const ExperimentDesign& design);

}  // namespace acd
