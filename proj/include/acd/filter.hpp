#pragma once

#include <string>
#include <vector>

#include "acd/params.hpp"
#include "acd/series.hpp"

namespace acd {

// Initial conditional duration psi_0: the initial observation x0 or omega.
enum class Psi0Rule { EqualX0, EqualOmega };

const char* to_string(Psi0Rule rule) noexcept;
Psi0Rule psi0_rule_from_string(const std::string& name);

// Conditional durations psi_1..psi_n. At each reset index r the recursion is
// restarted as if x_{r-1} were a fresh initial observation.
// Throws FilterOverflow naming the first index with a non-finite psi.
std::vector<double> psi_filter(const ParamTheta& theta, const DurationSeries& series, Psi0Rule rule);

}  // namespace acd
