#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sparseanom/kernels.hpp"
#include "sparseanom/rng.hpp"

using namespace sparseanom;
namespace k = sparseanom::kernels;

namespace {

std::vector<double> random(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<k::Isa> simd_variants() {
  std::vector<k::Isa> out;
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon}) {
    if (k::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST(Kernels, ScalarMatchesNaiveLoops) {
  const k::Table& s = k::table(k::Isa::scalar);
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  EXPECT_EQ(s.dot(a.data(), b.data(), 3), 12.0);
  EXPECT_EQ(s.squared_norm(a.data(), 3), 14.0);
  std::vector<double> y{1, 1, 1};
  s.axpy(2.0, a.data(), y.data(), 3);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7}));
}

TEST(Kernels, SimdVariantsAgreeWithScalar) {
  Rng rng(11);
  const k::Table& ref = k::table(k::Isa::scalar);
  for (k::Isa isa : simd_variants()) {
    const k::Table& simd = k::table(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 33u, 100u, 257u}) {
      const auto a = random(n, rng), b = random(n, rng);
      const double scale = 1.0 + ref.squared_norm(a.data(), n) + ref.squared_norm(b.data(), n);
      EXPECT_NEAR(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-13 * scale) << n;
      EXPECT_NEAR(simd.squared_norm(a.data(), n), ref.squared_norm(a.data(), n), 1e-13 * scale) << n;

      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      simd.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14 * (1 + std::abs(y1[i])));

      for (std::size_t cols : {1u, 3u, 4u, 5u, 9u}) {
        const auto mat = random(n * cols, rng);
        const auto v = random(n, rng);
        std::vector<double> o1(cols), o2(cols);
        ref.correlate(mat.data(), n, cols, v.data(), o1.data());
        simd.correlate(mat.data(), n, cols, v.data(), o2.data());
        for (std::size_t j = 0; j < cols; ++j) EXPECT_NEAR(o1[j], o2[j], 1e-12 * (1.0 + n)) << n << "x" << cols;

        const auto coeffs = random(cols, rng);
        std::vector<double> c1(n), c2(n);
        ref.combine(mat.data(), n, cols, coeffs.data(), c1.data());
        simd.combine(mat.data(), n, cols, coeffs.data(), c2.data());
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(c1[i], c2[i], 1e-12 * (1.0 + cols));
      }
    }
  }
}

TEST(Kernels, ScopedIsaPinsAndRestores) {
  const k::Isa before = k::active_isa();
  {
    k::ScopedIsa pin(k::Isa::scalar);
    EXPECT_EQ(k::active_isa(), k::Isa::scalar);
  }
  EXPECT_EQ(k::active_isa(), before);
}

TEST(Kernels, UnavailableVariantIsRejected) {
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon}) {
    if (!k::isa_available(isa)) EXPECT_THROW(k::force_isa(isa), std::exception);
  }
}

TEST(Kernels, SpanApiChecksLengths) {
  const std::vector<double> a(3, 1.0), b(4, 1.0);
  EXPECT_THROW(k::dot(a, b), std::exception);
  std::vector<double> out(2);
  EXPECT_THROW(k::correlate(b.data(), 2, 2, a, out), std::exception);
}
