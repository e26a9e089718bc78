#include "sparseanom/kernels.hpp"

namespace sparseanom::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void correlate(const double* m, std::size_t rows, std::size_t cols, const double* v,
               double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = dot(m + j * rows, v, rows);
}

void combine(const double* m, std::size_t rows, std::size_t cols, const double* c,
             double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (c[j] != 0.0) axpy(c[j], m + j * rows, out, rows);
  }
}

}  // namespace

const Table kTable{dot, squared_norm, axpy, correlate, combine};

}  // namespace sparseanom::kernels::scalar
