#pragma once

#include <span>
#include <vector>

#include "sparseanom/dictionary.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/sparse_code.hpp"

namespace sparseanom {

struct ConvexConfig {
  // Lasso weight; <= 0 selects the default 0.1 * ||D^T y||_inf per signal.
  double lambda = 0.0;
  double epsilon = 0.0;  // basis-pursuit noise bound
  std::size_t max_iter = 5000;
  double tol = 1e-6;
  double rho = 1.0;
};

inline double soft_threshold(double z, double a) {
  if (z > a) return z - a;
  if (z < -a) return z + a;
  return 0.0;
}

// Thrown when an iterative solver exhausts max_iter.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Vector last_iterate, double gap_estimate,
                   std::vector<double> history)
      : Error(ErrorCode::numeric, what),
        last_iterate_(std::move(last_iterate)),
        gap_estimate_(gap_estimate),
        history_(std::move(history)) {}

  const Vector& last_iterate() const { return last_iterate_; }
  // Lasso: duality gap. Basis pursuit: final primal residual.
  double gap_estimate() const { return gap_estimate_; }
  const std::vector<double>& history() const { return history_; }

 private:
  Vector last_iterate_;
  double gap_estimate_;
  std::vector<double> history_;
};

double default_lambda(const Dictionary& dict, std::span<const double> y);

double lasso_objective(const Dictionary& dict, std::span<const double> y, const Vector& x,
                       double lambda);

struct LassoResult {
  SparseCode code;
  double lambda = 0.0;
  std::vector<double> objective_history;  // after each full sweep
  double duality_gap = 0.0;
};

// min 0.5 ||Dx - y||^2 + lambda ||x||_1 by cyclic coordinate descent.
LassoResult lasso_solve(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg);
SparseCode lasso_encode(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg);

struct BasisPursuitResult {
  SparseCode code;
  std::vector<double> primal_residuals;  // per iteration
};

// min ||x||_1 s.t. ||Dx - y|| <= epsilon by ADMM. The returned coefficients
// are the dense linear-system iterate; its numerical non-zeros are all kept.
BasisPursuitResult bp_solve(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg);
SparseCode bp_encode(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg);

// Reusable factorisation of I + D^T D for repeated basis-pursuit solves with
// one dictionary.
class BasisPursuitSolver {
 public:
  explicit BasisPursuitSolver(const Dictionary& dict);
  BasisPursuitResult solve(std::span<const double> y, const ConvexConfig& cfg) const;

 private:
  const Dictionary* dict_;
  Eigen::LLT<Matrix> inner_;  // I_p + D D^T
  Matrix range_basis_;        // orthonormal basis of range(D), for feasibility
};

}  // namespace sparseanom
