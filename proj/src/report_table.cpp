#include "acd/report_table.hpp"

#include <cmath>

#include <fmt/format.h>

namespace acd {

TableRow make_row(const std::string& label, const FitResult& fit_u, const TestReport& report) {
  return {label, fit_u.theta_hat, report.se_theta, report.sum, report.se_sum, report.tau, report.qlr};
}

namespace {
constexpr int kLabelWidth = 6;
constexpr int kColWidth = 11;

std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}
}  // namespace

std::string format_table(const std::vector<TableRow>& rows, int omega_exponent) {
  const double scale = std::pow(10.0, omega_exponent);
  const std::string rule(kLabelWidth + 6 * kColWidth, '-');
  std::string out;
  out += rule + '\n';
  out += fmt::format("{:<{}}{:>{}}{:>{}}{:>{}}{:>{}}{:>{}}{:>{}}\n", "", kLabelWidth, "omega", kColWidth, "alpha",
                     kColWidth, "beta", kColWidth, "alpha+beta", kColWidth, "tau", kColWidth, "QLR", kColWidth);
  out += rule + '\n';
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}{:>{}.3f}{:>{}.3f}{:>{}.3f}{:>{}.3f}{:>{}.2f}{:>{}.2f}\n", r.label, kLabelWidth,
                       r.theta.omega * scale, kColWidth, r.theta.alpha, kColWidth, r.theta.beta, kColWidth, r.sum,
                       kColWidth, r.tau, kColWidth, r.qlr, kColWidth);
    auto paren = [](double v) { return fmt::format("({:.3f})", v); };
    out += rtrim(fmt::format("{:<{}}{:>{}}{:>{}}{:>{}}{:>{}}", "", kLabelWidth, paren(r.se_theta[0] * scale),
                             kColWidth, paren(r.se_theta[1]), kColWidth, paren(r.se_theta[2]), kColWidth,
                             paren(r.se_sum), kColWidth)) +
           '\n';
  }
  out += rule + '\n';
  if (omega_exponent != 0) out += fmt::format("Note: omega scaled by 10^{}.\n", omega_exponent);
  return out;
}

}  // namespace acd
