#include "acd/filter.hpp"

#include <cmath>

#include <fmt/format.h>

#include "acd/errors.hpp"

namespace acd {

const char* to_string(Psi0Rule rule) noexcept {
  return rule == Psi0Rule::EqualX0 ? "x0" : "omega";
}

Psi0Rule psi0_rule_from_string(const std::string& name) {
  if (name == "x0") return Psi0Rule::EqualX0;
  if (name == "omega") return Psi0Rule::EqualOmega;
  throw Error(ErrorKind::Config, fmt::format("unknown psi0 rule '{}' (expected x0 or omega)", name));
}

std::vector<double> psi_filter(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule) {
  const auto& x = series.x;
  std::vector<double> psi(x.size());
  auto next_reset = series.resets.begin();
  double x_prev = series.x0;
  double psi_prev = rule == Psi0Rule::EqualX0 ? series.x0 : theta.omega;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (next_reset != series.resets.end() && *next_reset == i) {
      ++next_reset;
      if (i > 0) psi_prev = rule == Psi0Rule::EqualX0 ? x_prev : theta.omega;
    }
    const double p = theta.omega + theta.alpha * x_prev + theta.beta * psi_prev;
    if (!std::isfinite(p)) {
      throw Error(ErrorKind::FilterOverflow,
                  fmt::format("conditional duration overflow at index {} for {}", i + 1, theta.str()));
    }
    psi[i] = p;
    x_prev = x[i];
    psi_prev = p;
  }
  return psi;
}

}  // namespace acd
