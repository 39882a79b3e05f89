#include "acd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <fmt/format.h>

namespace acd {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Coordinates pinned at a bound with the gradient pointing outward.
std::vector<bool> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  std::vector<bool> active(static_cast<std::size_t>(x.size()));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    active[static_cast<std::size_t>(j)] = (x[j] <= lo[j] && g[j] < 0.0) || (x[j] >= hi[j] && g[j] > 0.0);
  }
  return active;
}

double projected_grad_norm(const Eigen::VectorXd& g, const std::vector<bool>& active) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (!active[static_cast<std::size_t>(j)]) m = std::max(m, std::abs(g[j]));
  }
  return m;
}

// Solves (A + mu D) p = g on the free coordinates, raising mu until the
// damped matrix is positive definite.
Eigen::VectorXd newton_direction(const NewtonPoint& pt, const std::vector<bool>& active, double mu) {
  const Eigen::Index k = pt.grad.size();
  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!active[static_cast<std::size_t>(j)]) free.push_back(j);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
  if (free.empty()) return p;
  const auto m = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd g(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    g[r] = pt.grad[free[static_cast<std::size_t>(r)]];
    for (Eigen::Index c = 0; c < m; ++c) {
      a(r, c) = pt.info(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
    }
  }
  Eigen::VectorXd diag = a.diagonal().cwiseAbs();
  for (Eigen::Index r = 0; r < m; ++r) {
    if (!(diag[r] > 0.0) || !std::isfinite(diag[r])) diag[r] = 1.0;
  }
  Eigen::VectorXd sol;
  for (double damp = mu; damp < 1e12; damp = damp == 0.0 ? 1e-8 : damp * 10.0) {
    Eigen::MatrixXd damped = a;
    damped.diagonal() += damp * diag;
    Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() == Eigen::Success) {
      sol = llt.solve(g);
      if (sol.allFinite() && sol.dot(g) > 0.0) break;
    }
    sol.resize(0);
  }
  if (sol.size() == 0) sol = g.cwiseQuotient(diag);  // scaled gradient ascent
  for (Eigen::Index r = 0; r < m; ++r) p[free[static_cast<std::size_t>(r)]] = sol[r];
  return p;
}

}  // namespace

BoxNewtonResult maximize_box_newton(const std::function<NewtonPoint(const Eigen::VectorXd&)>& full,
                                    const std::function<double(const Eigen::VectorXd&)>& value,
                                    Eigen::VectorXd start, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi, const BoxNewtonOptions& options) {
  BoxNewtonResult res;
  res.x = project(start, lo, hi);
  res.at = full(res.x);
  auto active = active_set(res.x, res.at.grad, lo, hi);
  res.proj_grad_norm = projected_grad_norm(res.at.grad, active);

  double mu = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    res.iterations = it;
    const Eigen::VectorXd p = newton_direction(res.at, active, mu);

    double s = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn;
    double fn = 0.0;
    for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
      xn = project(res.x + s * p, lo, hi);
      const Eigen::VectorXd dx = xn - res.x;
      const double slope = res.at.grad.dot(dx);
      if (!(slope > 0.0)) break;
      fn = value(xn);
      if (std::isfinite(fn) && fn >= res.at.value + 1e-4 * slope) {
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      if (res.proj_grad_norm < options.grad_tol) {
        // No further progress is representable; the gradient test already holds.
        res.converged = true;
        res.message = "converged (line search stalled at rounding level)";
        return res;
      }
      if (mu < 1e6) {
        mu = mu == 0.0 ? 1e-4 : mu * 100.0;
        continue;
      }
      res.message = fmt::format("line search failed; projected gradient {:.3g} above tolerance {:.3g}",
                                res.proj_grad_norm, options.grad_tol);
      return res;
    }

    double step = 0.0;
    for (Eigen::Index j = 0; j < xn.size(); ++j) {
      step = std::max(step, std::abs(xn[j] - res.x[j]) / std::max(std::abs(res.x[j]), 1e-8));
    }
    res.x = xn;
    res.at = full(res.x);
    active = active_set(res.x, res.at.grad, lo, hi);
    res.proj_grad_norm = projected_grad_norm(res.at.grad, active);
    mu = s == 1.0 ? 0.0 : mu;

    if (res.proj_grad_norm < options.grad_tol && step < options.step_tol) {
      res.converged = true;
      res.message = "converged";
      return res;
    }
  }
  res.message = fmt::format("iteration limit {} reached; projected gradient {:.3g}", options.max_iter,
                            res.proj_grad_norm);
  return res;
}

}  // namespace acd
