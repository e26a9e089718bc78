#pragma once

// Dense two-phase simplex with Bland's rule, for small test instances only.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

// min c^T x  s.t.  A x = b, x >= 0. Returns nullopt when infeasible.
inline std::optional<Eigen::VectorXd> simplex(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::VectorXd& c) {
  const double eps = 1e-11;
  const Eigen::Index m = A.rows(), n = A.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }
  // Tableau columns: n originals, m artificials, rhs.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = A;
  t.block(0, n, m, m).setIdentity();
  t.topRightCorner(m, 1) = b;
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  auto pivot = [&](Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r != row && t(r, col) != 0.0) t.row(r) -= t(r, col) * t.row(row);
    }
    basis[row] = col;
  };
  // Objective row holds reduced costs; minimise by entering the lowest-index
  // negative reduced cost.
  auto run = [&](Eigen::Index usable) {
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < usable; ++j) {
        if (t(m, j) < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) > eps) {
          const double ratio = t(i, n + m) / t(i, enter);
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) throw std::runtime_error("simplex: unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit");
  };

  // Phase 1: minimise the sum of artificials.
  t.row(m).setZero();
  for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;
  run(n + m);
  if (-t(m, n + m) > 1e-8) return std::nullopt;
  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(t(i, j)) > eps) {
        pivot(i, j);
        break;
      }
    }
  }
  // Phase 2 over original columns only.
  t.row(m).setZero();
  t.row(m).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n && c[basis[i]] != 0.0) t.row(m) -= c[basis[i]] * t.row(i);
  }
  run(n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = t(i, n + m);
  }
  return x;
}

// min ||x||_1 s.t. D x = y, via x = u - v with u, v >= 0.
inline std::optional<Eigen::VectorXd> l1_min(const Eigen::MatrixXd& D, const Eigen::VectorXd& y) {
  const Eigen::Index m = D.cols();
  Eigen::MatrixXd A(D.rows(), 2 * m);
  A << D, -D;
  const auto uv = simplex(A, y, Eigen::VectorXd::Ones(2 * m));
  if (!uv) return std::nullopt;
  return Eigen::VectorXd(uv->head(m) - uv->tail(m));
}

}  // namespace oracle
