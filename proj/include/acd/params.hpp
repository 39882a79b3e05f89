#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

namespace acd {

// Conditional-duration parameters (omega, alpha, beta) of
//   psi_i = omega + alpha * x_{i-1} + beta * psi_{i-1}.
struct ParamTheta {
  double omega = 1.0;
  double alpha = 0.1;
  double beta = 0.8;

  double persistence() const noexcept { return alpha + beta; }

  // Unconditional mean duration omega / (1 - alpha - beta); empty when the
  // mean is infinite (alpha + beta >= 1).
  std::optional<double> mean_duration() const noexcept;

  // omega > 0, alpha > 0, beta >= 0, all finite.
  bool admissible() const noexcept;

  Eigen::Vector3d vec() const { return {omega, alpha, beta}; }
  static ParamTheta from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  std::string str() const;
};

// Integrated parameterization (omega, alpha) with beta = 1 - alpha.
struct ParamPhi {
  double omega = 1.0;
  double alpha = 0.1;

  ParamTheta theta() const noexcept { return {omega, alpha, 1.0 - alpha}; }
};

// Compact parameter box. Defaults are the concrete choice of the compact set.
struct ParamBounds {
  double omega_lo = 1e-8;
  double omega_hi = 1e6;
  double alpha_lo = 1e-8;
  double alpha_hi = 10.0;
  double beta_lo = 0.0;
  double beta_hi = 0.99999;

  bool contains(const ParamTheta& theta) const noexcept;
  ParamTheta clamp(const ParamTheta& theta) const noexcept;

  Eigen::Vector3d lower() const { return {omega_lo, alpha_lo, beta_lo}; }
  Eigen::Vector3d upper() const { return {omega_hi, alpha_hi, beta_hi}; }

  // Throws Config when a bound pair is inverted or omega/alpha lower bounds
  // are not strictly positive.
  void validate() const;
};

}  // namespace acd
