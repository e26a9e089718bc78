#include <gtest/gtest.h>

#include <sstream>

#include "sparseanom/bench.hpp"
#include "sparseanom/datagen.hpp"
#include "sparseanom/error.hpp"
#include "test_util.hpp"

using namespace sparseanom;

namespace {

struct Batch {
  Dictionary dict;
  RowMatrix y;
};

Batch noiseless_batch(std::size_t p, std::size_t m, std::size_t k, std::size_t n, std::uint64_t seed) {
  RecoveryConfig cfg;
  cfg.p = p;
  cfg.m = m;
  cfg.k = k;
  cfg.trials = n;
  cfg.seed = seed;
  cfg.shared_dictionary = true;
  const auto inst = gen_recovery(cfg);
  RowMatrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) y.row(static_cast<Eigen::Index>(i)) = inst[i].y.transpose();
  return {inst[0].dict, y};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Encode, ParseSolverNames) {
  EXPECT_EQ(parse_solver("StOMP"), Solver::stomp);
  EXPECT_EQ(parse_solver("bp"), Solver::bp);
  try {
    parse_solver("focuss");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(Encode, OutputIndependentOfThreads) {
  const Batch b = noiseless_batch(16, 32, 3, 25, 4);
  for (Solver s : {Solver::mp, Solver::omp, Solver::stomp, Solver::bp, Solver::lasso}) {
    const auto one = encode_all(s, b.dict, b.y, {}, 1);
    const auto four = encode_all(s, b.dict, b.y, {}, 4);
    ASSERT_EQ(one.size(), 25u);
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].coeffs, four[i].coeffs) << to_string(s);
  }
}

TEST(Encode, DimensionMismatch) {
  const Batch b = noiseless_batch(16, 32, 3, 2, 4);
  const Dictionary other = testutil::gaussian(8, 32, 1);
  try {
    encode_all(Solver::omp, other, b.y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(BenchCodes, SingleSolverSchema) {
  const Batch b = noiseless_batch(16, 32, 3, 10, 1);
  const auto rows = bench_codes(b.dict, b.y, {Solver::omp}, {});
  ASSERT_EQ(rows.size(), 1u);
  const std::string csv = code_bench_to_csv(rows);
  EXPECT_EQ(lines(csv), 2u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "solver,time_s,mean_error,density_pct,raw_density_pct,status");
  EXPECT_THROW(bench_codes(b.dict, b.y, {}, {}), Error);
}

TEST(BenchCodes, BasisPursuitReconstructsSpanningInstance) {
  const Batch b = noiseless_batch(16, 32, 3, 10, 2);
  const auto rows = bench_codes(b.dict, b.y, {Solver::bp}, {});
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_LE(rows[0].mean_error, 1e-8);
  EXPECT_EQ(rows[0].raw_density_pct, 100.0);
}

TEST(BenchCodes, FailuresAreRecordedPerRow) {
  const Batch b = noiseless_batch(16, 32, 6, 5, 3);
  SolverConfig cfg;
  cfg.convex.max_iter = 1;
  cfg.convex.tol = 1e-15;
  const auto rows = bench_codes(b.dict, b.y, {Solver::lasso, Solver::omp}, cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status, "ok");
}

TEST(BenchCodes, MetricsRepeatExactly) {
  const Batch b = noiseless_batch(16, 32, 3, 10, 6);
  const auto a = bench_codes(b.dict, b.y, {Solver::stomp, Solver::lasso}, {});
  const auto c = bench_codes(b.dict, b.y, {Solver::stomp, Solver::lasso}, {});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_error, c[i].mean_error);
    EXPECT_EQ(a[i].density_pct, c[i].density_pct);
    EXPECT_EQ(a[i].raw_density_pct, c[i].raw_density_pct);
  }
}

namespace {

// Four frames, one feature each; frames 0 and 1 are abnormal.
struct DetectFixture {
  Dictionary dict = testutil::gaussian(4, 8, 9).with_blocks(equal_blocks(8, 2));
  FeatureMatrix features;
  std::vector<SparseCode> codes;
  GroundTruth truth;

  DetectFixture() {
    features.values = RowMatrix::Zero(4, 4);
    for (std::uint32_t f = 0; f < 4; ++f) {
      Provenance p;
      p.frame_index = f;
      p.rect = {0, 0, 4, 4};
      features.provenance.push_back(p);
      truth.frame_labels[f] = f < 2;
      FrameMask m{4, 4, std::vector<std::uint8_t>(16, f < 2 ? 1 : 0)};
      truth.pixel_masks[f] = m;
    }
    // Abnormal frames get large residuals and spread codes.
    for (Eigen::Index i = 0; i < 4; ++i) {
      features.values.row(i) = Vector::Constant(4, i < 2 ? 3.0 : 0.1).transpose();
      Vector x = Vector::Zero(8);
      if (i < 2) {
        x.setConstant(0.01);
      } else {
        x[0] = 0.01;
      }
      codes.push_back(make_code(dict, row_span(features.values, i), x));
    }
  }
};

}  // namespace

TEST(BenchDetect, GridIsOrderIndependent) {
  DetectFixture fx;
  DetectBenchOptions opt;
  opt.frame_span = 1;
  const std::map<std::string, std::vector<SparseCode>> codes{{"omp", fx.codes}};
  const auto a = bench_detect(fx.dict, fx.features, codes, {Detector::re, Detector::are, Detector::mc, Detector::nc},
                              fx.truth, opt);
  const auto b = bench_detect(fx.dict, fx.features, codes, {Detector::nc, Detector::mc, Detector::are, Detector::re},
                              fx.truth, opt);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(detect_bench_to_csv(a), detect_bench_to_csv(b));
  for (const auto& row : a) {
    if (row.detector == Detector::are) continue;  // 8 atoms span R^4
    EXPECT_EQ(row.frame_auc, 1.0) << to_string(row.detector);
    EXPECT_EQ(row.status, "ok");
  }
}

TEST(BenchDetect, CellFailureDoesNotStopGrid) {
  DetectFixture fx;
  const Dictionary plain = testutil::gaussian(4, 8, 9);
  const std::map<std::string, std::vector<SparseCode>> codes{{"omp", fx.codes}};
  DetectBenchOptions opt;
  opt.frame_span = 1;
  const auto rows = bench_detect(plain, fx.features, codes, {Detector::re, Detector::nc}, fx.truth, opt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_NE(rows[1].status.find("NC requires blocked dictionary"), std::string::npos);
}
