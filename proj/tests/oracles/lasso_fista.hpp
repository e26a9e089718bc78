#pragma once

// Accelerated projected gradient on the split non-negative Lasso
//   min 0.5 ||y - D(u - v)||^2 + lambda 1^T (u + v),  u, v >= 0,
// an algorithm unrelated to coordinate descent.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace oracle {

inline double lasso_value(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                          double lambda) {
  return 0.5 * (y - D * x).squaredNorm() + lambda * x.lpNorm<1>();
}

inline Eigen::VectorXd lasso_fista(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, double lambda,
                                   int iterations = 200000) {
  const Eigen::Index m = D.cols();
  // Lipschitz constant of the split gradient is 2 * ||D||_2^2.
  const double L = 2.0 * Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues()(0) *
                   Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues()(0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * m), z = w, prev = w;
  double tk = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd x = z.head(m) - z.tail(m);
    const Eigen::VectorXd g = D.transpose() * (D * x - y);
    Eigen::VectorXd grad(2 * m);
    grad << g.array() + lambda, -g.array() + lambda;
    prev = w;
    w = (z - grad / L).cwiseMax(0.0);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = w + ((tk - 1.0) / tn) * (w - prev);
    tk = tn;
    if (it % 1000 == 999 && (w - prev).lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  return w.head(m) - w.tail(m);
}

}  // namespace oracle
