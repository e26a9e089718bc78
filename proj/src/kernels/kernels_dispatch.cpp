#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"

namespace sparseanom::kernels {
namespace {

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SPARSEANOM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SPARSEANOM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() noexcept {
  if (const char* env = std::getenv("SPARSEANOM_ISA")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && cpu_supports(isa)) return isa;
    }
  }
  if (cpu_supports(Isa::avx2)) return Isa::avx2;
  if (cpu_supports(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) noexcept { return cpu_supports(isa); }

void force_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw Error(ErrorCode::invalid_argument,
                std::string("instruction set not available: ") + isa_name(isa));
  }
  current().store(isa, std::memory_order_relaxed);
}

const Table& table(Isa isa) {
  switch (isa) {
#if defined(SPARSEANOM_HAVE_AVX2)
    case Isa::avx2: return avx2::kTable;
#endif
#if defined(SPARSEANOM_HAVE_NEON)
    case Isa::neon: return neon::kTable;
#endif
    default: return scalar::kTable;
  }
}

namespace {
inline const Table& active() { return table(active_isa()); }

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": length " + std::to_string(a) + " vs " + std::to_string(b));
  }
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) {
  return active().squared_norm(a.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void correlate(const double* matrix, std::size_t rows, std::size_t cols,
               std::span<const double> v, std::span<double> out) {
  require_same(v.size(), rows, "correlate");
  require_same(out.size(), cols, "correlate");
  active().correlate(matrix, rows, cols, v.data(), out.data());
}

void combine(const double* matrix, std::size_t rows, std::size_t cols,
             std::span<const double> coeffs, std::span<double> out) {
  require_same(coeffs.size(), cols, "combine");
  require_same(out.size(), rows, "combine");
  active().combine(matrix, rows, cols, coeffs.data(), out.data());
}

}  // namespace sparseanom::kernels
