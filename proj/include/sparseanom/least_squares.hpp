#pragma once

#include <span>
#include <vector>

#include "sparseanom/linalg.hpp"

namespace sparseanom {

// Incrementally grown thin QR of a column subset, via modified Gram-Schmidt
// with one re-orthogonalisation pass. Used by the greedy coders to keep
// least-squares coefficients exact after each selection.
class IncrementalQr {
 public:
  explicit IncrementalQr(std::size_t rows, double rank_tol = 1e-10);

  // Appends column c. Returns false (state unchanged) when the component of c
  // orthogonal to the current span is below rank_tol * ||c||.
  bool add(std::span<const double> c);

  std::size_t rank() const { return cols_; }

  // Least-squares coefficients of y on the accepted columns, in append order.
  Vector solve(std::span<const double> y) const;
  // y minus its projection on the accepted columns.
  Vector residual(std::span<const double> y) const;

 private:
  std::size_t rows_;
  double rank_tol_;
  std::size_t cols_ = 0;
  std::vector<double> q_;  // rows x cols, column-major
  Matrix r_;               // upper triangular, grown on demand
};

}  // namespace sparseanom
