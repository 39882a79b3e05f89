#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "acd/errors.hpp"
#include "acd/montecarlo.hpp"
#include "acd/normal.hpp"
#include "acd/rng.hpp"

using namespace acd;

namespace {

std::vector<double> normal_sample(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(m);
  for (auto& x : v) x = normal_quantile(rng.uniform());
  return v;
}

ExperimentDesign small_design() {
  ExperimentDesign d;
  d.explicit_cells = {{1.0, 300, 0.5}};
  d.replications = 40;
  d.pilot_reps = 200;
  d.master_seed = 17;
  d.fit.starts = 1;
  d.failure_budget = 0.1;
  return d;
}

}  // namespace

TEST_CASE("type 7 quantile") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0, 5.0};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 5.0);
  CHECK(empirical_quantile(v, 0.5) == 3.0);
  CHECK(empirical_quantile(v, 0.1) == doctest::Approx(1.4));
  CHECK(empirical_quantile({7.0}, 0.3) == 7.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), Error);
}

TEST_CASE("QQ points and KS distance of normal draws") {
  const auto v = normal_sample(20000, 5);
  const auto qq = qq_data(v);
  REQUIRE(qq.size() == v.size());
  double worst = 0.0;
  for (std::size_t i = qq.size() / 200; i < qq.size() - qq.size() / 200; ++i) {
    worst = std::max(worst, std::abs(qq[i].first - qq[i].second));
  }
  CHECK(worst < 0.1);
  for (std::size_t i = 1; i < qq.size(); ++i) {
    CHECK(qq[i].first > qq[i - 1].first);
    CHECK(qq[i].second >= qq[i - 1].second);
  }
  // 1.36 / sqrt(M) is the 5% critical value.
  CHECK(ks_distance_normal(v) < 1.36 / std::sqrt(20000.0));
  CHECK_THROWS_AS(qq_data(normal_sample(99, 1)), Error);
}

TEST_CASE("KS distance detects a shift") {
  auto v = normal_sample(5000, 8);
  for (auto& x : v) x += 0.5;
  // sup |Phi(x - 0.5) - Phi(x)| = 2 Phi(0.25) - 1
  CHECK(ks_distance_normal(v) == doctest::Approx(2.0 * normal_cdf(0.25) - 1.0).epsilon(0.15));
  CHECK(ks_distance_normal({0.0}) == doctest::Approx(0.5));
}

TEST_CASE("rejection rows and Monte Carlo standard errors") {
  CellSamples s;
  s.cell = {1.0, 2500, 0.5};
  s.tau = {-3.0, -1.7, -1.0, 0.0, 0.5, 1.0, 1.8, 2.5, 0.1, 0.2};
  s.qlr_normalized = {5.0, 0.1, 0.2, 0.3, 4.0, 0.0, 0.0, 0.0, 0.0, 3.85};
  const auto rows = erp_rows(s, 0.05);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].statistic == "tau");
  CHECK(rows[0].sidedness == "two_sided");
  CHECK(rows[0].erp == doctest::Approx(0.2));  // |tau| > 1.96
  CHECK(rows[1].statistic == "qlr");
  CHECK(rows[1].erp == doctest::Approx(0.3));  // > 3.8415
  CHECK(rows[2].sidedness == "left");
  CHECK(rows[2].erp == doctest::Approx(0.2));  // < -1.645
  CHECK(rows[3].sidedness == "right");
  CHECK(rows[3].erp == doctest::Approx(0.2));
  for (const auto& r : rows) CHECK(r.mc_se == doctest::Approx(std::sqrt(r.erp * (1.0 - r.erp) / 10.0)));
}

TEST_CASE("design grid and validation") {
  ExperimentDesign d;
  CHECK(d.cells().size() == 45);
  const auto g = d.c_grid(0.5);
  REQUIRE(g.size() == 100);
  CHECK(g.front() == doctest::Approx(-0.128));
  CHECK(g.back() == doctest::Approx(0.128));
  CHECK_THROWS_AS(d.c_grid(0.3), Error);
  d.c_values = {-0.01, 0.0};
  CHECK(d.c_grid(0.3) == d.c_values);

  CHECK(d.innovation(1.0).law() == InnovationLaw::Exponential);
  CHECK(d.innovation(2.0).law() == InnovationLaw::Weibull);
  CHECK(d.innovation(2.0).variance() == doctest::Approx(2.0).epsilon(1e-8));

  d.validate();
  ExperimentDesign bad = small_design();
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_design();
  bad.eta = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_design();
  bad.explicit_cells = {{1.0, 100, 1.0}};
  CHECK_THROWS_AS(bad.validate(), Error);
  const auto j = design_to_json(small_design());
  CHECK(j.contains("master_seed"));
}

TEST_CASE("cells are bit-identical across worker counts") {
  const auto d = small_design();
  SpanCache cache;
  const double t = cache.get(d, d.cells().front()).t_span;
  const auto a = run_cell(d, d.cells().front(), 0.0, t, 1);
  const auto b = run_cell(d, d.cells().front(), 0.0, t, 3);
  CHECK(a.tau == b.tau);
  CHECK(a.qlr == b.qlr);
  CHECK(a.n == b.n);
  CHECK(a.failures == b.failures);
  CHECK(a.failure_log == b.failure_log);
  for (double q : a.qlr) CHECK(q >= 0.0);
  // Different master seeds give different samples.
  auto d2 = d;
  d2.master_seed = 18;
  CHECK(run_cell(d2, d.cells().front(), 0.0, t, 1).tau != a.tau);
}

TEST_CASE("size study and size-adjusted power") {
  auto d = small_design();
  d.c_values = {-0.1, 0.0};
  SpanCache cache;
  const auto null_study = run_size_study(d, 2, cache);
  REQUIRE(null_study.rows.size() == 4);
  REQUIRE(null_study.samples.size() == 1);
  const auto pts = run_power_study(d, null_study, 2, cache);
  REQUIRE(pts.size() == 4);
  // At c = 0 the adjusted rejection rate is eta up to one replication.
  for (const auto& p : pts) {
    if (p.c == 0.0) CHECK(std::abs(p.erp - d.eta) <= 1.0 / 40.0 + 1e-12);
  }
  std::ostringstream erp, pw, qq;
  write_erp_csv(erp, null_study.rows);
  write_power_csv(pw, pts);
  write_qq_csv(qq, {{0.0, 0.1}});
  CHECK(erp.str().rfind("sigma2,med_n,alpha0,statistic,sidedness,erp,mc_se\n", 0) == 0);
  CHECK(pw.str().rfind("alpha0,med_n,c,side,erp\n", 0) == 0);
  CHECK(qq.str() == "theoretical,empirical\n0,0.10000000000000001\n");
}

TEST_CASE("power study needs matching null samples") {
  auto d = small_design();
  SizeStudyResult empty;
  SpanCache cache;
  CHECK_THROWS_AS(run_power_study(d, empty, 1, cache), Error);
}

TEST_CASE("failure budget is enforced") {
  auto d = small_design();
  d.failure_budget = 0.0;
  d.replications = 200;
  SpanCache cache;
  const double t = cache.get(d, d.cells().front()).t_span;
  try {
    run_cell(d, d.cells().front(), 0.0, t, 1);
    FAIL("expected the budget to be exceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
  }
}
