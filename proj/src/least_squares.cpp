#include "sparseanom/least_squares.hpp"

#include <cmath>

#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"

namespace sparseanom {

IncrementalQr::IncrementalQr(std::size_t rows, double rank_tol)
    : rows_(rows), rank_tol_(rank_tol) {}

bool IncrementalQr::add(std::span<const double> c) {
  if (c.size() != rows_) throw Error(ErrorCode::dimension_mismatch, "IncrementalQr::add");
  if (cols_ >= rows_) return false;
  const double cnorm = std::sqrt(kernels::squared_norm(c));
  if (cnorm == 0.0) return false;

  std::vector<double> v(c.begin(), c.end());
  Vector proj = Vector::Zero(static_cast<Eigen::Index>(cols_));
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < cols_; ++k) {
      std::span<const double> qk(q_.data() + k * rows_, rows_);
      const double h = kernels::dot(qk, v);
      proj[static_cast<Eigen::Index>(k)] += h;
      kernels::axpy(-h, qk, v);
    }
  }
  const double vnorm = std::sqrt(kernels::squared_norm(v));
  if (vnorm <= rank_tol_ * cnorm) return false;

  for (double& x : v) x /= vnorm;
  q_.insert(q_.end(), v.begin(), v.end());
  const auto k = static_cast<Eigen::Index>(cols_);
  if (r_.rows() <= k) {
    const Eigen::Index cap = std::max<Eigen::Index>(8, 2 * (k + 1));
    Matrix grown = Matrix::Zero(cap, cap);
    grown.topLeftCorner(r_.rows(), r_.cols()) = r_;
    r_ = std::move(grown);
  }
  r_.col(k).head(k) = proj;
  r_(k, k) = vnorm;
  ++cols_;
  return true;
}

Vector IncrementalQr::solve(std::span<const double> y) const {
  const auto k = static_cast<Eigen::Index>(cols_);
  Vector qty(k);
  for (std::size_t j = 0; j < cols_; ++j) {
    qty[static_cast<Eigen::Index>(j)] = kernels::dot({q_.data() + j * rows_, rows_}, y);
  }
  return r_.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qty);
}

Vector IncrementalQr::residual(std::span<const double> y) const {
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < cols_; ++j) {
      std::span<const double> qj(q_.data() + j * rows_, rows_);
      kernels::axpy(-kernels::dot(qj, as_span(r)), qj, as_span(r));
    }
  }
  return r;
}

}  // namespace sparseanom
