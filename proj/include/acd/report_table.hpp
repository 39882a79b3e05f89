#pragma once

#include <string>
#include <vector>

#include "acd/inference.hpp"
#include "acd/likelihood.hpp"

namespace acd {

// One line of the estimates table: estimates with standard errors, then the
// IACD statistics.
struct TableRow {
  std::string label;
  ParamTheta theta{};
  Eigen::Vector3d se_theta = Eigen::Vector3d::Zero();
  double sum = 0.0;
  double se_sum = 0.0;
  double tau = 0.0;
  double qlr = 0.0;
};

TableRow make_row(const std::string& label, const FitResult& fit_u, const TestReport& report);

// Fixed-width table: columns omega, alpha, beta, alpha+beta, tau, QLR, with
// standard errors in parentheses on the following line. Estimates use three
// decimals and statistics two; omega (and its standard error) is multiplied
// by 10^omega_exponent.
std::string format_table(const std::vector<TableRow>& rows, int omega_exponent = 3);

}  // namespace acd
