#pragma once

// Data-parallel inner loops shared by every solver. Each kernel has a scalar
// reference implementation and SIMD variants (AVX2+FMA on x86-64, NEON on
// aarch64). The variant is picked once at startup from CPU features and can be
// pinned with SPARSEANOM_ISA=scalar|avx2|neon or force_isa().

#include <cstddef>
#include <span>

namespace sparseanom::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa) noexcept;

// The variant currently serving the dispatching entry points.
Isa active_isa() noexcept;

// Whether a variant is compiled in and supported by this CPU.
bool isa_available(Isa isa) noexcept;

// Pins the variant. Throws Error(invalid_argument) if unavailable.
void force_isa(Isa isa);

// RAII pin for tests and benchmarks.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { force_isa(isa); }
  ~ScopedIsa() { force_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// out[j] = <column j, v> for a column-major rows x cols matrix.
void correlate(const double* matrix, std::size_t rows, std::size_t cols,
               std::span<const double> v, std::span<double> out);
// out = sum_j coeffs[j] * column j  (out is overwritten)
void combine(const double* matrix, std::size_t rows, std::size_t cols,
             std::span<const double> coeffs, std::span<double> out);

// Variant tables. Exposed so equivalence tests can call each one directly.
struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_norm)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*correlate)(const double*, std::size_t, std::size_t, const double*, double*);
  void (*combine)(const double*, std::size_t, std::size_t, const double*, double*);
};

const Table& table(Isa isa);

namespace scalar {
extern const Table kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Table kTable;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const Table kTable;
}
#endif

}  // namespace sparseanom::kernels
