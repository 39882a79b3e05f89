#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace acd {

// Value, gradient and information (negated Hessian) of a function to maximize.
struct NewtonPoint {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd info;
};

struct BoxNewtonOptions {
  int max_iter = 200;
  double grad_tol = 1e-6;
  double step_tol = 1e-10;
};

struct BoxNewtonResult {
  Eigen::VectorXd x;
  NewtonPoint at;
  double proj_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

// Projected Newton ascent on a box with an active set for bound-constrained
// coordinates, Levenberg damping when the information is not positive
// definite, and Armijo backtracking along the projection arc. `value` must
// return -inf for points where the objective cannot be evaluated; `full` may
// throw for such points.
BoxNewtonResult maximize_box_newton(const std::function<NewtonPoint(const Eigen::VectorXd&)>& full,
                                    const std::function<double(const Eigen::VectorXd&)>& value,
                                    Eigen::VectorXd start, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi, const BoxNewtonOptions& options);

}  // namespace acd
