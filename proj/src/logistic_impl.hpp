#pragma once

#include <cmath>

namespace shiftaudit::detail {

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename Derived>
LogisticFit fit_logistic(const Eigen::MatrixBase<Derived>& x, const Eigen::VectorXd& y, double l2,
                         double tolerance, int max_iterations) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd design(n, d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, l2);
  penalty[d] = 0.0;

  const auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd z = design * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += softplus(z[i]) - y[i] * z[i];
    return loss / static_cast<double>(n) + 0.5 * theta.cwiseProduct(penalty).dot(theta);
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double current = objective(theta);
  LogisticFit fit;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd z = design * theta;
    Eigen::VectorXd p(n);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      curvature[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - y) / static_cast<double>(n) + theta.cwiseProduct(penalty);
    fit.iterations = iter;
    if (grad.lpNorm<Eigen::Infinity>() < tolerance) {
      fit.converged = true;
      break;
    }
    Eigen::MatrixXd hessian = design.transpose() * curvature.asDiagonal() * design / static_cast<double>(n);
    hessian.diagonal() += penalty;
    hessian.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hessian.ldlt().solve(grad);
    if (!step.allFinite() || grad.dot(step) <= 0.0) step = grad;

    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd candidate = theta - step;
    double value = objective(candidate);
    while (value > current - 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      candidate = theta - t * step;
      value = objective(candidate);
    }
    if (!(value <= current)) break;
    theta = candidate;
    current = value;
    fit.iterations = iter + 1;
  }
  if (!fit.converged) {
    // Re-check after the last accepted step.
    const Eigen::VectorXd z = design * theta;
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p[i] = sigmoid(z[i]);
    const Eigen::VectorXd grad =
        design.transpose() * (p - y) / static_cast<double>(n) + theta.cwiseProduct(penalty);
    fit.converged = grad.lpNorm<Eigen::Infinity>() < tolerance;
  }
  fit.weights = theta.head(d);
  fit.bias = theta[d];
  return fit;
}

}  // namespace shiftaudit::detail
