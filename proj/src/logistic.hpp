#pragma once

#include <Eigen/Dense>

namespace shiftaudit::detail {

struct LogisticFit {
  Eigen::VectorXd weights;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes mean log-loss + (l2 / 2) * |w|^2 (bias unpenalized) by damped
/// Newton steps with Armijo backtracking, until the gradient's max-norm drops
/// below `tolerance`.
template <typename Derived>
LogisticFit fit_logistic(const Eigen::MatrixBase<Derived>& x, const Eigen::VectorXd& y, double l2,
                         double tolerance, int max_iterations);

double softplus(double z);
double sigmoid(double z);

}  // namespace shiftaudit::detail

#include "logistic_impl.hpp"
