#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "acd/errors.hpp"
#include "acd/inference.hpp"
#include "acd/likelihood.hpp"
#include "acd/simulator.hpp"

using namespace acd;

namespace {

DurationSeries sample_series(std::size_t n, std::uint64_t seed, ParamTheta th = {1.0, 0.3, 0.6}) {
  Rng rng(seed);
  return simulate_count(th, InnovationSpec::exponential(), 500, n, rng);
}

ParamTheta random_theta(Rng& rng) {
  return {0.2 + 2.8 * rng.uniform(), 0.05 + 0.55 * rng.uniform(), 0.2 + 0.7 * rng.uniform()};
}

Eigen::Vector3d fd_score(const ParamTheta& th, const DurationSeries& s, Psi0Rule rule) {
  Eigen::Vector3d g;
  const Eigen::Vector3d v = th.vec();
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-6 * std::abs(v[j]);
    Eigen::Vector3d up = v, dn = v;
    up[j] += h;
    dn[j] -= h;
    g[j] = (loglik(ParamTheta::from_vec(up), s, rule) - loglik(ParamTheta::from_vec(dn), s, rule)) / (2 * h);
  }
  return g;
}

Eigen::Matrix3d fd_info(const ParamTheta& th, const DurationSeries& s, Psi0Rule rule) {
  Eigen::Matrix3d m;
  const Eigen::Vector3d v = th.vec();
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-6 * std::abs(v[j]);
    Eigen::Vector3d up = v, dn = v;
    up[j] += h;
    dn[j] -= h;
    m.col(j) = -(score_and_info(ParamTheta::from_vec(up), s, rule).score -
                 score_and_info(ParamTheta::from_vec(dn), s, rule).score) /
               (2 * h);
  }
  return m;
}

double rel_err(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1.0); }

}  // namespace

TEST_CASE("log-likelihood hand computations") {
  SUBCASE("psi forced to one") {
    DurationSeries s{0.3, {1.0}, 1.0, {}};
    CHECK(loglik({1.0, 1e-12, 0.0}, s, Psi0Rule::EqualOmega) == doctest::Approx(-1.0).epsilon(1e-11));
  }
  SUBCASE("two observations") {
    DurationSeries s{2.0, {4.0, 1.0}, 10.0, {}};
    const double expected = -(std::log(3.0) + 4.0 / 3.0) - (std::log(4.5) + 1.0 / 4.5);
    CHECK(loglik({1.0, 0.5, 0.5}, s, Psi0Rule::EqualX0) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("log-likelihood is bounded by the per-term maximum") {
  Rng rng(3);
  const auto s = sample_series(100, 9);
  double bound = 0.0;
  for (double x : s.x) bound -= std::log(x) + 1.0;
  for (int k = 0; k < 50; ++k) CHECK(loglik(random_theta(rng), s, Psi0Rule::EqualX0) <= bound);
}

TEST_CASE("analytic score and information agree with finite differences") {
  Rng rng(20250509);
  for (std::size_t n : {50u, 200u}) {
    for (int k = 0; k < 20; ++k) {
      auto s = sample_series(n, 100 + static_cast<std::uint64_t>(k));
      if (k % 4 == 3) s.resets = {n / 3, 2 * n / 3};
      const auto th = random_theta(rng);
      for (auto rule : {Psi0Rule::EqualX0, Psi0Rule::EqualOmega}) {
        const auto d = score_and_info(th, s, rule);
        CHECK(d.loglik == doctest::Approx(loglik(th, s, rule)).epsilon(1e-13));
        const auto g = fd_score(th, s, rule);
        for (int j = 0; j < 3; ++j) CHECK(rel_err(d.score[j], g[j]) < 1e-6);
        const auto m = fd_info(th, s, rule);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) CHECK(rel_err(d.info(r, c), m(r, c)) < 1e-5);
        CHECK((d.info - d.info.transpose()).cwiseAbs().maxCoeff() < 1e-9 * d.info.cwiseAbs().maxCoeff());
        CHECK((d.opg - d.opg.transpose()).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("restricted gradient is the chain rule through the boundary map") {
  Rng rng(8);
  const auto gamma = restriction_jacobian();
  CHECK(gamma(2, 1) == -1.0);
  CHECK(gamma(0, 0) == 1.0);
  CHECK(gamma(1, 1) == 1.0);
  const auto s = sample_series(200, 4);
  for (int k = 0; k < 20; ++k) {
    const ParamPhi phi{0.2 + 2.0 * rng.uniform(), 0.05 + 0.9 * rng.uniform()};
    const Eigen::Vector2d g = gamma.transpose() * score_and_info(phi.theta(), s, Psi0Rule::EqualX0).score;
    const double hw = 1e-6 * phi.omega, ha = 1e-6 * phi.alpha;
    const double dw = (loglik(ParamPhi{phi.omega + hw, phi.alpha}.theta(), s, Psi0Rule::EqualX0) -
                       loglik(ParamPhi{phi.omega - hw, phi.alpha}.theta(), s, Psi0Rule::EqualX0)) /
                      (2 * hw);
    const double da = (loglik(ParamPhi{phi.omega, phi.alpha + ha}.theta(), s, Psi0Rule::EqualX0) -
                       loglik(ParamPhi{phi.omega, phi.alpha - ha}.theta(), s, Psi0Rule::EqualX0)) /
                      (2 * ha);
    CHECK(rel_err(g[0], dw) < 1e-6);
    CHECK(rel_err(g[1], da) < 1e-6);
  }
}

TEST_CASE("unrestricted and restricted fits on simulated IACD data") {
  const ParamTheta theta0{1.0, 0.5, 0.5};
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    SimConfig cfg;
    cfg.theta0 = theta0;
    cfg.t_span = 2e5;
    cfg.seed = seed;
    const auto s = simulate_span(cfg);
    const auto fu = fit_unrestricted(s);
    const auto fr = fit_restricted(s);
    const double n = static_cast<double>(s.n());
    CHECK(fu.converged);
    CHECK(fr.converged);
    CHECK(fu.score.cwiseAbs().maxCoeff() < 1e-6 * n);
    CHECK(fu.loglik >= loglik(theta0, s, Psi0Rule::EqualX0));
    CHECK(fr.loglik <= fu.loglik);
    CHECK(fr.theta_hat.alpha + fr.theta_hat.beta == 1.0);
    const Eigen::Vector2d gr = restriction_jacobian().transpose() * fr.score;
    CHECK(gr.cwiseAbs().maxCoeff() < 1e-6 * n);
    CHECK(qlr_stat(fu, fr, false) >= 0.0);
    CHECK(fu.residuals.size() == s.n());
    CHECK(fu.n == s.n());
    CHECK(fu.t_span == s.t_span);
    CHECK_FALSE(fu.restricted);
    CHECK(fr.restricted);
    // Information is positive definite at the optimum.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(fu.info);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("fits are deterministic and reject short series") {
  const auto s = sample_series(300, 12);
  const auto a = fit_unrestricted(s);
  const auto b = fit_unrestricted(s);
  CHECK(a.theta_hat.omega == b.theta_hat.omega);
  CHECK(a.theta_hat.alpha == b.theta_hat.alpha);
  CHECK(a.loglik == b.loglik);
  DurationSeries tiny{1.0, {1.0, 2.0, 0.5}, 10.0, {}};
  try {
    fit_unrestricted(tiny);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  FitOptions bad;
  bad.starts = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("unrestricted optimum is scale equivariant") {
  const auto s = sample_series(400, 21, {0.5, 0.2, 0.7});
  const auto base = fit_unrestricted(s);
  for (double lam : {0.01, 100.0}) {
    DurationSeries t = s;
    t.x0 *= lam;
    t.t_span *= lam;
    for (double& x : t.x) x *= lam;
    const auto f = fit_unrestricted(t);
    CHECK(f.theta_hat.omega / lam == doctest::Approx(base.theta_hat.omega).epsilon(1e-6));
    CHECK(std::abs(f.theta_hat.alpha - base.theta_hat.alpha) < 1e-6);
    CHECK(std::abs(f.theta_hat.beta - base.theta_hat.beta) < 1e-6);
    const double shift = -static_cast<double>(s.n()) * std::log(lam);
    CHECK(f.loglik == doctest::Approx(base.loglik + shift).epsilon(1e-10));
    // At identical scaled parameters the shift is exact up to rounding.
    ParamTheta scaled = base.theta_hat;
    scaled.omega *= lam;
    CHECK(loglik(scaled, t, Psi0Rule::EqualX0) ==
          doctest::Approx(loglik(base.theta_hat, s, Psi0Rule::EqualX0) + shift).epsilon(1e-12));
  }
}

TEST_CASE("residuals at the true parameter recover the innovations") {
  // With a one-step burn-in from the zero state, psi_0 = omega exactly, so the
  // psi0 = omega filter reproduces the simulated conditional durations.
  const ParamTheta th{0.8, 0.4, 0.55};
  const auto innov = InnovationSpec::weibull(1.435);
  Rng sim_rng(31);
  const auto s = simulate_count(th, innov, 0, 1000, sim_rng);
  Rng eps_rng(31);
  innov.sample(eps_rng);  // x0's innovation
  const auto res = residuals(th, s, Psi0Rule::EqualOmega);
  const auto psi = psi_filter(th, s, Psi0Rule::EqualOmega);
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double eps = innov.sample(eps_rng);
    CHECK(psi[i] * eps == s.x[i]);
    CHECK(std::abs(res[i] - eps) <= 2.0 * std::numeric_limits<double>::epsilon() * eps);
  }
}

TEST_CASE("residual variance at the truth approaches the innovation variance") {
  const ParamTheta th{1.0, 0.3, 0.65};
  const auto innov = InnovationSpec::weibull(0.721);
  Rng rng(55);
  const auto s = simulate_count(th, innov, 1000, 100000, rng);
  const auto f = evaluate_at(th, s, Psi0Rule::EqualX0, false);
  double mean = 0.0;
  for (double e : f.residuals) mean += e;
  mean /= static_cast<double>(f.residuals.size());
  double m4 = 0.0;
  for (double e : f.residuals) m4 += std::pow(e - mean, 4);
  m4 /= static_cast<double>(f.residuals.size());
  const double se = std::sqrt((m4 - f.sigma2_eps_hat * f.sigma2_eps_hat) / static_cast<double>(f.residuals.size()));
  CHECK(std::abs(f.sigma2_eps_hat - innov.variance()) < 5.0 * se);
}

TEST_CASE("estimates cover the truth within three standard errors") {
  const ParamTheta theta0{1.0, 0.5, 0.5};
  const auto cal = calibrate_span(theta0, InnovationSpec::exponential(), 2500, 400, 17);
  int covered_u = 0, covered_r = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    SimConfig cfg;
    cfg.theta0 = theta0;
    cfg.t_span = cal.t_span;
    cfg.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto s = simulate_span(cfg);
    const auto fu = fit_unrestricted(s);
    const auto se = parameter_covariance(fu, SigmaMethod::Sandwich).diagonal().cwiseSqrt();
    const Eigen::Vector3d z = (fu.theta_hat.vec() - theta0.vec()).cwiseQuotient(se);
    covered_u += z.cwiseAbs().maxCoeff() <= 3.0 ? 1 : 0;
    const auto fr = fit_restricted(s);
    const auto gamma = restriction_jacobian();
    const Eigen::Matrix2d ir = gamma.transpose() * fr.info * gamma;
    const Eigen::Matrix2d jr = gamma.transpose() * fr.opg * gamma;
    const Eigen::Matrix2d ii = ir.inverse();
    const Eigen::Vector2d se_r = (ii * jr * ii).diagonal().cwiseSqrt();
    const double zw = (fr.theta_hat.omega - theta0.omega) / se_r[0];
    const double za = (fr.theta_hat.alpha - theta0.alpha) / se_r[1];
    covered_r += std::max(std::abs(zw), std::abs(za)) <= 3.0 ? 1 : 0;
  }
  CHECK(covered_u >= 0.96 * reps);
  CHECK(covered_r >= 0.96 * reps);
}
