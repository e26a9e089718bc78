#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "sparseanom/error.hpp"
#include "sparseanom/features.hpp"
#include "sparseanom/rng.hpp"
#include "test_util.hpp"

using namespace sparseanom;

namespace {

VideoTensor random_video(std::size_t t, std::size_t h, std::size_t w, std::uint64_t seed) {
  VideoTensor v(t, h, w);
  Rng rng(seed);
  for (float& x : v.data()) x = static_cast<float>(rng.uniform());
  return v;
}

std::vector<double> cube_of(const CubeGeometry& g, const std::function<double(std::size_t, std::size_t, std::size_t)>& f) {
  std::vector<double> c(g.depth * g.patch_h * g.patch_w);
  for (std::size_t t = 0; t < g.depth; ++t) {
    for (std::size_t y = 0; y < g.patch_h; ++y) {
      for (std::size_t x = 0; x < g.patch_w; ++x) c[(t * g.patch_h + y) * g.patch_w + x] = f(t, y, x);
    }
  }
  return c;
}

RowMatrix random_rows(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (auto& v : x.reshaped()) v = rng.normal();
  return x;
}

}  // namespace

TEST(Cubes, GridArithmetic) {
  const CubeGrid g = cube_grid(5, 158, 238, {});
  EXPECT_EQ(g.cols, 10u);
  EXPECT_EQ(g.rows, 10u);
  EXPECT_EQ(g.slabs, 1u);
  EXPECT_EQ(extract_cubes(VideoTensor(5, 158, 238)).size(), 100u);
}

TEST(Cubes, TilingCountMatchesFloorFormula) {
  for (auto [t, h, w] : {std::tuple{5, 15, 23}, {12, 40, 70}, {20, 90, 115}, {9, 31, 47}}) {
    const auto cubes = extract_cubes(VideoTensor(t, h, w));
    EXPECT_EQ(cubes.size(), static_cast<std::size_t>((w / 23) * (h / 15) * (t / 5)));
  }
}

TEST(Cubes, TooShortVideoIsRejected) {
  try {
    extract_cubes(VideoTensor(4, 30, 30));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(Cubes, ProvenanceAndVoxels) {
  const VideoTensor v = random_video(10, 30, 46, 1);
  const auto cubes = extract_cubes(v);
  ASSERT_EQ(cubes.size(), 8u);
  const Cube& c = cubes[7];  // slab 1, row 1, col 1
  EXPECT_EQ(c.provenance.frame_index, 5u);
  EXPECT_EQ(c.provenance.patch_row, 1u);
  EXPECT_EQ(c.provenance.patch_col, 1u);
  EXPECT_EQ(c.provenance.rect, (PixelRect{23, 15, 23, 15}));
  EXPECT_EQ(c.voxels[0], static_cast<double>(v.at(5, 15, 23)));
  EXPECT_EQ(c.voxels.back(), static_cast<double>(v.at(9, 29, 45)));
}

TEST(Descriptor, ConstantCubeIsZero) {
  const CubeGeometry g;
  const auto c = cube_of(g, [](auto, auto, auto) { return 0.7; });
  const Vector d = gradient_descriptor(c, g);
  EXPECT_EQ(static_cast<std::size_t>(d.size()), 500u);
  EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Descriptor, HorizontalRampOnlyFeedsGx) {
  const CubeGeometry g;
  const auto c = cube_of(g, [](auto, auto, std::size_t x) { return 0.01 * static_cast<double>(x); });
  const Vector d = gradient_descriptor(c, g);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (i % 3 == 0) EXPECT_NEAR(d[i], 0.01, 1e-12) << i;
    else EXPECT_EQ(d[i], 0.0) << i;
  }
}

TEST(Descriptor, InvariantToIntensityOffset) {
  const CubeGeometry g;
  Rng rng(3);
  auto c = cube_of(g, [&](auto, auto, auto) { return rng.uniform(); });
  const Vector a = gradient_descriptor(c, g);
  for (double& v : c) v += 0.1;
  const Vector b = gradient_descriptor(c, g);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Descriptor, DimensionFollowsCells) {
  CubeGeometry g;
  EXPECT_EQ(descriptor_dim(g), 500u);
  DescriptorConfig small{2, 2, 1, 500};
  EXPECT_EQ(descriptor_dim(g, small), 12u);
}

TEST(Features, ExtractMatchesPerCubeDescriptors) {
  const VideoTensor v = random_video(10, 30, 46, 2);
  const FeatureMatrix f1 = extract_features(v, {}, {}, 1);
  const FeatureMatrix f4 = extract_features(v, {}, {}, 4);
  EXPECT_EQ(f1.values, f4.values);
  EXPECT_EQ(f1.provenance, f4.provenance);
  const auto cubes = extract_cubes(v);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const Vector d = gradient_descriptor(cubes[i].voxels, {});
    EXPECT_EQ(Vector(f1.values.row(static_cast<Eigen::Index>(i)).transpose()), d);
  }
}

TEST(Pca, ExactSubspaceExplainsAll) {
  Rng rng(5);
  RowMatrix x(40, 5);
  Vector a(5), b(5), o(5);
  for (int i = 0; i < 5; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    o[i] = rng.normal();
  }
  for (Eigen::Index i = 0; i < 40; ++i) x.row(i) = (o + rng.normal() * a + rng.normal() * b).transpose();
  const PcaModel m = pca_fit(x, 2);
  EXPECT_NEAR(m.explained_ratio(), 1.0, 1e-9);
}

TEST(Pca, FullRankProjectionIsIsometry) {
  const RowMatrix x = random_rows(20, 6, 7);
  const PcaModel m = pca_fit(x, 6);
  const RowMatrix z = pca_apply(m, x);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index j = i + 1; j < 20; ++j) {
      EXPECT_NEAR((z.row(i) - z.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-8);
    }
  }
}

TEST(Pca, ReconstructionErrorMatchesSpectralOracle) {
  const RowMatrix x = random_rows(50, 10, 9);
  const PcaModel m = pca_fit(x, 3);
  const RowMatrix back = pca_reconstruct(m, pca_apply(m, x));
  const double mse = (x - back).squaredNorm() / 50.0;
  // Oracle: singular values of the centred data via Jacobi SVD.
  const Matrix centred = x.rowwise() - x.colwise().mean();
  const Vector s = Eigen::JacobiSVD<Matrix>(centred).singularValues();
  const double tail = s.tail(7).squaredNorm() / 50.0;
  EXPECT_NEAR(mse, tail, 1e-9);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.explained_variance[i], s[i] * s[i] / 50.0, 1e-9);
}

TEST(Pca, OrthonormalBasisSignAndMean) {
  const RowMatrix x = random_rows(30, 8, 11);
  const PcaModel m = pca_fit(x, 4);
  EXPECT_LE((m.basis.transpose() * m.basis - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index j = 0; j < 4; ++j) {
    Eigen::Index idx;
    m.basis.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(m.basis(idx, j), 0.0);
  }
  RowMatrix mean_row(1, 8);
  mean_row.row(0) = m.mean.transpose();
  EXPECT_LE(pca_apply(m, mean_row).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 1; i < 4; ++i) EXPECT_LE(m.explained_variance[i], m.explained_variance[i - 1]);
}

TEST(Pca, RejectsBadRank) {
  EXPECT_THROW(pca_fit(random_rows(5, 8, 1), 6), Error);
  EXPECT_THROW(pca_fit(random_rows(1, 8, 1), 1), Error);
}

TEST(FeatureIo, RoundTrips) {
  const auto dir = testutil::scratch_dir("feature_io");
  const VideoTensor v = random_video(10, 30, 46, 4);
  save_video(v, dir / "v.bin");
  EXPECT_TRUE(load_video(dir / "v.bin") == v);

  const FeatureMatrix f = extract_features(v);
  save_features(f, dir / "f.bin");
  const FeatureMatrix g = load_features(dir / "f.bin");
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.provenance, f.provenance);

  const PcaModel m = pca_fit(f.values, 3);
  save_pca(m, dir / "p.bin");
  const PcaModel n = load_pca(dir / "p.bin");
  EXPECT_EQ(n.basis, m.basis);
  EXPECT_EQ(n.mean, m.mean);
  EXPECT_EQ(n.explained_variance, m.explained_variance);
  EXPECT_EQ(n.total_variance, m.total_variance);

  try {
    load_features(dir / "v.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::bad_magic);
  }
}

TEST(FeatureIo, PgmDirectory) {
  const auto dir = testutil::scratch_dir("pgm");
  for (int t = 0; t < 5; ++t) {
    std::ofstream out(dir / ("frame_" + std::to_string(t) + ".pgm"), std::ios::binary);
    out << "P5\n# comment\n3 2\n255\n";
    for (int i = 0; i < 6; ++i) out.put(static_cast<char>(t * 50 + i));
  }
  std::ofstream(dir / "notes.txt") << "ignored";
  const VideoTensor v = load_video_any(dir);
  ASSERT_EQ(v.frames(), 5u);
  EXPECT_EQ(v.height(), 2u);
  EXPECT_EQ(v.width(), 3u);
  EXPECT_FLOAT_EQ(v.at(2, 1, 2), 105.0f / 255.0f);
}
