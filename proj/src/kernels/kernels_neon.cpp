#include <arm_neon.h>

#include "sparseanom/kernels.hpp"

namespace sparseanom::kernels::neon {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
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

}  // namespace sparseanom::kernels::neon
