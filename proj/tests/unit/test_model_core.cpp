#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "acd/errors.hpp"
#include "acd/filter.hpp"
#include "acd/innovation.hpp"
#include "acd/params.hpp"
#include "acd/quadrature.hpp"
#include "acd/rng.hpp"
#include "acd/theory.hpp"

using namespace acd;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// E[(a eps + b)^k] for standard exponential eps, via the upper incomplete
// gamma function: a^k e^{b/a} Gamma(k + 1, b/a).
double exp_moment_closed(double a, double b, double k) {
  return std::pow(a, k) * std::exp(b / a) * boost::math::tgamma(k + 1.0, b / a);
}

// Composite Simpson for the integral of exp(-s) h(s) over [0, upper], in the
// variable u = s^{1/3} to smooth fractional powers at the origin.
template <typename H>
double simpson_exp(H h, double upper = 200.0, int panels = 400000) {
  const double du = std::cbrt(upper) / panels;
  double acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double u = i * du;
    const double s = u * u * u;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * 3.0 * u * u * std::exp(-s) * h(s);
  }
  return acc * du / 3.0;
}

// Brute-force root scan on (0, 50] followed by bisection on the closed form.
double kappa_oracle(double a, double b) {
  const double step = 5e-3;
  double prev_k = step;
  double prev = exp_moment_closed(a, b, prev_k) - 1.0;
  for (double k = 2 * step; k <= 50.0; k += step) {
    const double cur = exp_moment_closed(a, b, k) - 1.0;
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
      double lo = prev_k, hi = k;
      const bool increasing = cur >= 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = exp_moment_closed(a, b, mid) - 1.0;
        if ((v > 0.0) == increasing) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
    prev_k = k;
  }
  return -1.0;
}

}  // namespace

TEST_CASE("ParamTheta admissibility and derived mean") {
  CHECK(ParamTheta{1.0, 0.5, 0.5}.admissible());
  CHECK_FALSE(ParamTheta{0.0, 0.5, 0.5}.admissible());
  CHECK_FALSE(ParamTheta{1.0, 0.0, 0.5}.admissible());
  CHECK_FALSE(ParamTheta{1.0, 0.5, -0.1}.admissible());
  CHECK(ParamTheta{1.0, 0.1, 0.0}.admissible());
  CHECK(ParamTheta{2.0, 0.1, 0.8}.mean_duration().value() == doctest::Approx(20.0));
  CHECK_FALSE(ParamTheta{2.0, 0.5, 0.5}.mean_duration().has_value());
}

TEST_CASE("ParamPhi maps onto the integrated boundary exactly") {
  for (double a : {1e-5, 0.15, 0.3, 0.5, 0.7, 0.85, 0.999}) {
    const auto th = ParamPhi{3.0, a}.theta();
    CHECK(th.alpha + th.beta == 1.0);
  }
}

TEST_CASE("ParamBounds default box, clamping and validation") {
  ParamBounds b;
  CHECK(b.contains({1.0, 0.5, 0.4}));
  CHECK_FALSE(b.contains({1.0, 0.5, 1.0}));
  const auto c = b.clamp({1e9, 0.0, 2.0});
  CHECK(c.omega == b.omega_hi);
  CHECK(c.alpha == b.alpha_lo);
  CHECK(c.beta == b.beta_hi);
  ParamBounds bad;
  bad.omega_lo = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  ParamBounds inverted;
  inverted.beta_lo = 0.5;
  inverted.beta_hi = 0.4;
  CHECK_THROWS_AS(inverted.validate(), Error);
}

TEST_CASE("psi filter hand recursions") {
  SUBCASE("psi0 = x0") {
    DurationSeries s{2.0, {4.0, 1.0}, 10.0, {}};
    const auto psi = psi_filter({1.0, 0.5, 0.5}, s, Psi0Rule::EqualX0);
    REQUIRE(psi.size() == 2);
    CHECK(psi[0] == 3.0);
    CHECK(psi[1] == 4.5);
  }
  SUBCASE("beta = 0") {
    DurationSeries s{1.0, {5.0}, 10.0, {}};
    const auto psi = psi_filter({2.0, 0.3, 0.0}, s, Psi0Rule::EqualX0);
    CHECK(psi[0] == doctest::Approx(2.3).epsilon(1e-15));
  }
  SUBCASE("psi0 = omega") {
    DurationSeries s{2.0, {0.7, 3.0}, 10.0, {}};
    const auto psi = psi_filter({1.0, 0.5, 0.5}, s, Psi0Rule::EqualOmega);
    CHECK(psi[0] == 2.5);
  }
}

TEST_CASE("psi filter restarts at reset indices") {
  DurationSeries s{2.0, {4.0, 1.0, 3.0}, 10.0, {2}};
  const ParamTheta th{1.0, 0.5, 0.5};
  const auto psi_x0 = psi_filter(th, s, Psi0Rule::EqualX0);
  CHECK(psi_x0[2] == 1.0 + 0.5 * 1.0 + 0.5 * 1.0);
  const auto psi_w = psi_filter(th, s, Psi0Rule::EqualOmega);
  CHECK(psi_w[2] == 1.0 + 0.5 * 1.0 + 0.5 * 1.0);
  DurationSeries s2{2.0, {4.0, 1.0, 3.0}, 10.0, {2}};
  const auto psi_w2 = psi_filter({1.0, 0.5, 0.3}, s2, Psi0Rule::EqualOmega);
  CHECK(psi_w2[2] == doctest::Approx(1.0 + 0.5 * 1.0 + 0.3 * 1.0));
}

TEST_CASE("psi is bounded below by omega") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ParamTheta th{0.1 + rng.uniform(), 0.01 + rng.uniform(), 0.98 * rng.uniform()};
    DurationSeries s;
    s.x0 = rng.uniform();
    s.t_span = 1.0;
    for (int i = 0; i < 100; ++i) s.x.push_back(1e-3 + 3.0 * rng.uniform());
    for (auto rule : {Psi0Rule::EqualX0, Psi0Rule::EqualOmega}) {
      for (double p : psi_filter(th, s, rule)) CHECK(p >= th.omega);
    }
  }
}

TEST_CASE("psi filter reports overflow with the index") {
  DurationSeries s{1.0, std::vector<double>(200, 1e308), 1.0, {}};
  try {
    psi_filter({1.0, 5.0, 0.9}, s, Psi0Rule::EqualX0);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FilterOverflow);
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
}

TEST_CASE("psi0 rule parsing") {
  CHECK(psi0_rule_from_string("x0") == Psi0Rule::EqualX0);
  CHECK(psi0_rule_from_string("omega") == Psi0Rule::EqualOmega);
  CHECK_THROWS_AS(psi0_rule_from_string("zero"), Error);
}

TEST_CASE("innovation variance formula and validation") {
  CHECK(InnovationSpec::exponential().variance() == 1.0);
  CHECK(InnovationSpec::weibull(1.0).variance() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(InnovationSpec::weibull(2.0).variance() == doctest::Approx(4.0 / M_PI - 1.0).epsilon(1e-13));
  CHECK_THROWS_AS(InnovationSpec::weibull(0.0), Error);
  CHECK_THROWS_AS(InnovationSpec::weibull(-1.0), Error);
  // Monotone decreasing in nu.
  double prev = 1e300;
  for (double nu = 0.3; nu < 20.0; nu *= 1.3) {
    const double v = InnovationSpec::weibull(nu).variance();
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("innovation densities integrate to one with unit mean") {
  for (double nu : {0.721, 1.0, 1.435, 3.0}) {
    const auto w = InnovationSpec::weibull(nu);
    const auto mass =
        integrate_interval([&](double u) { return 3.0 * u * u * w.density(u * u * u); }, 0.0, std::cbrt(80.0));
    CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(w.expect([](double e) { return e; }) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.expect([](double e) { return (e - 1.0) * (e - 1.0); }) ==
          doctest::Approx(w.variance()).epsilon(1e-11));
  }
}

TEST_CASE("exponential sampling has unit mean") {
  Rng rng(2024);
  const auto e = InnovationSpec::exponential();
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += e.sample(rng);
  CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(n));
}

TEST_CASE("Weibull nu = 1 draws coincide with exponential draws") {
  Rng a(5), b(5);
  const auto w = InnovationSpec::weibull(1.0);
  const auto e = InnovationSpec::exponential();
  std::vector<double> xw, xe;
  for (int i = 0; i < 100000; ++i) {
    xw.push_back(w.sample(a));
    xe.push_back(e.sample(b));
  }
  // Two-sample KS statistic against the 5% critical value.
  std::sort(xw.begin(), xw.end());
  std::sort(xe.begin(), xe.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xw.size() && j < xe.size()) {
    if (xw[i] <= xe[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / 100000.0);
  }
  CHECK(d < 1.36 * std::sqrt(2.0 / 100000.0));
}

TEST_CASE("Weibull sample variance matches the formula") {
  const double nu = 0.721;
  const auto w = InnovationSpec::weibull(nu);
  Rng rng(77);
  const int n = 1000000;
  std::vector<double> x(n);
  double mean = 0.0;
  for (auto& v : x) {
    v = w.sample(rng);
    mean += v;
  }
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  const double se = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(m2 - 2.0) < 5.0 * se);
}

TEST_CASE("stationarity functional examples") {
  const auto e = InnovationSpec::exponential();
  CHECK(stationarity_functional(0.0, 0.9, e) == doctest::Approx(std::log(0.9)).epsilon(1e-15));
  CHECK(stationarity_functional(1.0, 0.0, e) == doctest::Approx(-kEulerGamma).epsilon(1e-10));
  CHECK(stationarity_functional(0.5, 0.5, e) < 0.0);
  CHECK(stationarity_functional(2.0, 1.0, e) > 0.0);
  CHECK_THROWS_AS(stationarity_functional(0.0, 0.0, e), Error);
  // Independent oracle for an interior case.
  const double oracle = simpson_exp([](double s) { return std::log(0.3 * s + 0.6); });
  CHECK(stationarity_functional(0.3, 0.6, e) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("tail index on the integrated boundary is exactly one") {
  for (double a : {0.15, 0.5, 0.85, 1.0}) {
    for (const auto& innov : {InnovationSpec::exponential(), InnovationSpec::weibull(0.721),
                              InnovationSpec::weibull(1.435)}) {
      CHECK(tail_index(a, 1.0 - a, innov) == 1.0);
      const double m1 = innov.expect([=](double e) { return a * e + 1.0 - a; });
      CHECK(std::abs(m1 - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("tail index matches the brute-force root scan") {
  const auto e = InnovationSpec::exponential();
  SUBCASE("alpha + beta < 1 gives kappa > 1") {
    const double k = tail_index(0.1, 0.8, e);
    const double oracle = kappa_oracle(0.1, 0.8);
    CHECK(k > 1.0);
    CHECK(k == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::abs(exp_moment_closed(0.1, 0.8, k) - 1.0) < 1e-10);
  }
  SUBCASE("alpha + beta > 1 gives kappa < 1") {
    const double k = tail_index(0.6, 0.45, e);
    const double oracle = kappa_oracle(0.6, 0.45);
    CHECK(k < 1.0);
    CHECK(k > 0.0);
    CHECK(k == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::abs(exp_moment_closed(0.6, 0.45, k) - 1.0) < 1e-10);
  }
  SUBCASE("Weibull innovations against Simpson") {
    const auto w = InnovationSpec::weibull(1.435);
    const double k = tail_index(0.3, 0.65, w);
    const double m = simpson_exp([&](double s) { return std::pow(0.3 * w.from_standard_exponential(s) + 0.65, k); });
    CHECK(std::abs(m - 1.0) < 1e-8);
  }
}

TEST_CASE("tail index rejects non-stationary parameters") {
  // (0.2, 0.85) has alpha + beta > 1 and E[log(alpha eps + beta)] > 0, so no
  // positive root exists.
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{0.2, 0.85}}) {
    try {
      tail_index(a, b, InnovationSpec::exponential());
      FAIL("expected a domain error");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::Domain);
    }
  }
}

TEST_CASE("c0 constant") {
  const auto e = InnovationSpec::exponential();
  const double c1 = c0_constant(1.0, 1.0, e);
  CHECK(c1 == doctest::Approx(1.0 / (1.0 - kEulerGamma)).epsilon(1e-12));
  CHECK(std::abs(c1 - 2.36) < 0.01);
  CHECK(c0_constant(5.0, 1.0, e) == doctest::Approx(5.0 * c1).epsilon(1e-14));
  for (double lam : {0.01, 3.0, 250.0}) {
    CHECK(c0_constant(lam * 0.7, 0.4, e) == doctest::Approx(lam * c0_constant(0.7, 0.4, e)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(c0_constant(1.0, 1.5, e), Error);
}

TEST_CASE("c0 quadrature agrees with a Monte Carlo average") {
  const auto e = InnovationSpec::exponential();
  const double c = c0_constant(1.0, 0.5, e);
  Rng rng(99);
  const auto mc = e.expect_monte_carlo(
      [](double x) {
        const double y = 1.0 + 0.5 * (x - 1.0);
        return y * std::log(y);
      },
      10000000, rng);
  CHECK(std::abs(1.0 / c - mc.mean) < 3.0 * mc.std_error);
}

TEST_CASE("Weibull shape for a target variance") {
  CHECK(weibull_shape_for_variance(1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(weibull_shape_for_variance(0.5) - 1.435) < 1e-3);
  CHECK(std::abs(weibull_shape_for_variance(2.0) - 0.721) < 1e-3);
  for (double target = 0.1; target <= 10.0; target *= 1.25) {
    const double nu = weibull_shape_for_variance(target);
    CHECK(std::abs(InnovationSpec::weibull(nu).variance() - target) < 1e-7);
  }
  CHECK_THROWS_AS(weibull_shape_for_variance(0.0), Error);
}

TEST_CASE("exp-weighted quadrature handles log singularity and heavy moments") {
  const auto log_mean = integrate_exp_weighted([](double s) { return std::log(s); });
  CHECK(log_mean.value == doctest::Approx(-kEulerGamma).epsilon(1e-12));
  const auto m20 = integrate_exp_weighted([](double s) { return std::pow(s, 20.0); });
  CHECK(m20.value == doctest::Approx(std::tgamma(21.0)).epsilon(1e-12));
}
