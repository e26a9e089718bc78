#include <gtest/gtest.h>

#include <cmath>

#include "oracles/lasso_fista.hpp"
#include "oracles/simplex.hpp"
#include "sparseanom/convex.hpp"
#include "sparseanom/datagen.hpp"
#include "sparseanom/error.hpp"
#include "test_util.hpp"

using namespace sparseanom;

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  EXPECT_EQ(soft_threshold(1.0, 1.0), 0.0);
}

TEST(Lasso, LargeLambdaGivesExactZero) {
  const Dictionary d = testutil::gaussian(10, 20, 1);
  Rng rng(2);
  const Vector y = testutil::random_vector(10, rng);
  ConvexConfig cfg;
  cfg.lambda = (d.atoms().transpose() * y).cwiseAbs().maxCoeff();
  const SparseCode c = lasso_encode(d, as_span(y), cfg);
  EXPECT_EQ(c.nnz(), 0u);
  EXPECT_TRUE(c.support.empty());
}

TEST(Lasso, OrthonormalClosedForm) {
  Rng rng(4);
  Matrix g(8, 8);
  for (auto& v : g.reshaped()) v = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  const Dictionary d(q);
  const Vector y = testutil::random_vector(8, rng);
  ConvexConfig cfg;
  cfg.lambda = 0.3;
  cfg.tol = 1e-12;
  const SparseCode c = lasso_encode(d, as_span(y), cfg);
  const Vector z = q.transpose() * y;
  for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(c.coeffs[j], soft_threshold(z[j], 0.3), 1e-10);
}

TEST(Lasso, MatchesFistaOracleObjective) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dictionary d = testutil::gaussian(10, 20, 10 + seed);
    Rng rng(20 + seed);
    const Vector y = testutil::random_vector(10, rng);
    ConvexConfig cfg;
    cfg.lambda = 0.1;
    cfg.tol = 1e-10;
    cfg.max_iter = 100000;
    const LassoResult r = lasso_solve(d, as_span(y), cfg);
    const Vector ref = oracle::lasso_fista(d.atoms(), y, 0.1);
    const double ours = oracle::lasso_value(d.atoms(), y, r.code.coeffs, 0.1);
    const double theirs = oracle::lasso_value(d.atoms(), y, ref, 0.1);
    EXPECT_NEAR(ours, theirs, 1e-6) << "seed " << seed;
    EXPECT_NEAR(ours, lasso_objective(d, as_span(y), r.code.coeffs, 0.1), 1e-12);
  }
}

TEST(Lasso, StationarityAndMonotoneObjective) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = gen_recovery(16, 40, 4, 0.05, 1, 50 + seed).front();
    ConvexConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 100000;
    const LassoResult r = lasso_solve(inst.dict, as_span(inst.y), cfg);
    const Vector resid = inst.y - inst.dict.atoms() * r.code.coeffs;
    const Vector corr = inst.dict.atoms().transpose() * resid;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      const double x = r.code.coeffs[j];
      if (x != 0.0) {
        EXPECT_NEAR(corr[j], r.lambda * (x > 0 ? 1.0 : -1.0), 1e-6);
      } else {
        EXPECT_LE(std::abs(corr[j]), r.lambda + 1e-6);
      }
    }
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] + 1e-12);
    }
    EXPECT_GE(r.duality_gap, -1e-9);
    EXPECT_LE(r.duality_gap, 1e-6);
  }
}

TEST(Lasso, ScaleCovariance) {
  const auto inst = gen_recovery(12, 30, 3, 0.02, 1, 5).front();
  ConvexConfig cfg;
  cfg.lambda = 0.05;
  cfg.tol = 1e-11;
  cfg.max_iter = 100000;
  const SparseCode base = lasso_encode(inst.dict, as_span(inst.y), cfg);
  for (double alpha : {0.1, 4.0}) {
    ConvexConfig scaled = cfg;
    scaled.lambda = alpha * cfg.lambda;
    const Vector ys = alpha * inst.y;
    const SparseCode c = lasso_encode(inst.dict, as_span(ys), scaled);
    EXPECT_LE((c.coeffs - alpha * base.coeffs).cwiseAbs().maxCoeff(), 1e-7 * alpha);
  }
}

TEST(Lasso, DefaultLambdaIsTenthOfMaxCorrelation) {
  const Dictionary d = testutil::gaussian(6, 9, 3);
  Rng rng(1);
  const Vector y = testutil::random_vector(6, rng);
  EXPECT_DOUBLE_EQ(default_lambda(d, as_span(y)), 0.1 * (d.atoms().transpose() * y).cwiseAbs().maxCoeff());
}

TEST(Lasso, IterationCapRaisesConvergenceError) {
  const auto inst = gen_recovery(16, 40, 6, 0.1, 1, 3).front();
  ConvexConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  try {
    lasso_solve(inst.dict, as_span(inst.y), cfg);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::numeric);
    EXPECT_EQ(e.last_iterate().size(), 40);
  }
}

TEST(BasisPursuit, AtomSignalMatchesLpOracle) {
  const Dictionary d = testutil::gaussian(6, 12, 8);
  const Vector y = d.atoms().col(3);
  ConvexConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iter = 50000;
  const SparseCode c = bp_encode(d, as_span(y), cfg);
  const auto lp = oracle::l1_min(d.atoms(), y);
  ASSERT_TRUE(lp);
  EXPECT_LE(c.coeffs.lpNorm<1>(), 1.0 + 1e-6);
  EXPECT_LE(c.coeffs.lpNorm<1>(), lp->lpNorm<1>() + 1e-6);
  EXPECT_LE(c.residual_norm, 1e-6);
}

TEST(BasisPursuit, ZeroSignal) {
  const Dictionary d = testutil::gaussian(5, 10, 1);
  const Vector y = Vector::Zero(5);
  const SparseCode c = bp_encode(d, as_span(y), {});
  EXPECT_EQ(c.coeffs.squaredNorm(), 0.0);
}

TEST(BasisPursuit, NotWorseThanLpOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dictionary d = testutil::gaussian(8, 20, 200 + seed);
    Rng rng(300 + seed);
    const Vector y = testutil::random_vector(8, rng);
    ConvexConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 100000;
    const BasisPursuitResult r = bp_solve(d, as_span(y), cfg);
    const auto lp = oracle::l1_min(d.atoms(), y);
    ASSERT_TRUE(lp);
    EXPECT_LE(r.code.coeffs.lpNorm<1>(), lp->lpNorm<1>() + 1e-4) << "seed " << seed;
    EXPECT_LE(r.code.residual_norm, 1e-6);
    // Primal residual settles: after burn-in it ends below where it started.
    ASSERT_GT(r.primal_residuals.size(), 20u);
    EXPECT_LE(r.primal_residuals.back(), r.primal_residuals[20]);
  }
}

TEST(BasisPursuit, ExactRecoveryRegime) {
  RecoveryConfig rc;
  rc.p = 32;
  rc.m = 64;
  rc.k = 4;
  rc.trials = 5;
  rc.seed = 12;
  ConvexConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iter = 20000;
  for (const auto& inst : gen_recovery(rc)) {
    const SparseCode c = bp_encode(inst.dict, as_span(inst.y), cfg);
    EXPECT_LE((c.coeffs - inst.x_star).cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_EQ(c.nnz(), 64u);
  }
}

TEST(BasisPursuit, NoiseBallIsRespected) {
  const auto inst = gen_recovery(16, 32, 3, 0.05, 1, 4).front();
  ConvexConfig cfg;
  cfg.epsilon = 0.2;
  cfg.tol = 1e-8;
  cfg.max_iter = 50000;
  const SparseCode c = bp_encode(inst.dict, as_span(inst.y), cfg);
  EXPECT_LE(c.residual_norm, 0.2 + 1e-5);
  cfg.epsilon = 0.0;
  const SparseCode tight = bp_encode(inst.dict, as_span(inst.y), cfg);
  EXPECT_LE(c.coeffs.lpNorm<1>(), tight.coeffs.lpNorm<1>() + 1e-6);
}

TEST(BasisPursuit, OutOfSpanIsInfeasible) {
  Matrix a = Matrix::Zero(4, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  const Dictionary d(a);
  Vector y(4);
  y << 1, 1, 1, 0;
  try {
    bp_encode(d, as_span(y), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible);
  }
  ConvexConfig cfg;
  cfg.epsilon = 1.5;
  EXPECT_NO_THROW(bp_encode(d, as_span(y), cfg));
}

TEST(BasisPursuit, SharedSolverMatchesOneShot) {
  const auto inst = gen_recovery(10, 20, 2, 0.0, 1, 6).front();
  const BasisPursuitSolver solver(inst.dict);
  const auto a = solver.solve(as_span(inst.y), {});
  const auto b = bp_solve(inst.dict, as_span(inst.y), {});
  EXPECT_EQ(a.code.coeffs, b.code.coeffs);
}
