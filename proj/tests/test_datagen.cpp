#include <gtest/gtest.h>

#include "sparseanom/datagen.hpp"
#include "sparseanom/error.hpp"

using namespace sparseanom;

TEST(Recovery, DeterministicAndConsistent) {
  const auto a = gen_recovery(8, 16, 2, 0.0, 1, 42);
  const auto b = gen_recovery(8, 16, 2, 0.0, 1, 42);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0].dict == b[0].dict);
  EXPECT_EQ(a[0].x_star, b[0].x_star);
  EXPECT_EQ(a[0].y, b[0].y);
  EXPECT_EQ(a[0].support.size(), 2u);
  EXPECT_LE((a[0].y - a[0].dict.atoms() * a[0].x_star).norm(), 1e-15);
  for (auto j : a[0].support) {
    EXPECT_GE(std::abs(a[0].x_star[j]), 0.5);
    EXPECT_LE(std::abs(a[0].x_star[j]), 1.5);
  }
}

TEST(Recovery, ZeroSparsityGivesZeroSignal) {
  const auto a = gen_recovery(8, 16, 0, 0.0, 3, 1);
  for (const auto& inst : a) EXPECT_EQ(inst.y.squaredNorm(), 0.0);
}

TEST(Recovery, SharedDictionaryAndNoise) {
  RecoveryConfig cfg;
  cfg.p = 10;
  cfg.m = 20;
  cfg.k = 3;
  cfg.sigma = 0.1;
  cfg.trials = 4;
  cfg.seed = 5;
  cfg.shared_dictionary = true;
  const auto a = gen_recovery(cfg);
  EXPECT_TRUE(a[0].dict == a[3].dict);
  EXPECT_GT((a[0].y - a[0].dict.atoms() * a[0].x_star).norm(), 0.0);
  cfg.shared_dictionary = false;
  const auto b = gen_recovery(cfg);
  EXPECT_FALSE(b[0].dict == b[1].dict);
}

TEST(Recovery, RejectsBadShape) {
  EXPECT_THROW(gen_recovery(16, 8, 2, 0.0, 1, 1), Error);
  EXPECT_THROW(gen_recovery(8, 16, 8, 0.0, 1, 1), Error);
}

TEST(Scene, NoAnomaliesMeansEmptyMasks) {
  const auto s = gen_scene(20, 30, 46, 0.0, 3);
  EXPECT_EQ(s.video.frames(), 20u);
  for (std::size_t t = 0; t < 20; ++t) {
    EXPECT_FALSE(s.frame_labels[t]);
    EXPECT_TRUE(s.masks.frames[t].empty());
  }
  for (float v : s.video.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Scene, ExplicitBlobDefinesAbnormalFrames) {
  SceneConfig cfg;
  cfg.frames = 30;
  cfg.height = 40;
  cfg.width = 60;
  cfg.anomaly_rate = 1.0;
  cfg.blobs = {BlobSpec{10, 6, 20.0, 20.0, 3.0, 0.0, 4.0, 1.0f}};
  const auto s = gen_scene(cfg);
  for (std::size_t t = 0; t < 30; ++t) {
    EXPECT_EQ(s.frame_labels[t], t >= 10 && t < 16) << t;
    EXPECT_EQ(s.frame_labels[t], !s.masks.frames[t].empty());
  }
  // Disc centre on the first abnormal frame.
  EXPECT_EQ(s.masks.frames[10].pixels[20 * 60 + 20], 1);
}

TEST(Scene, SeededRunsAreBitIdentical) {
  const auto a = gen_scene(40, 45, 69, 0.3, 9);
  const auto b = gen_scene(40, 45, 69, 0.3, 9);
  const auto c = gen_scene(40, 45, 69, 0.3, 10);
  EXPECT_TRUE(a.video == b.video);
  EXPECT_EQ(a.masks, b.masks);
  EXPECT_FALSE(a.video == c.video);
  std::size_t abnormal = 0;
  for (std::size_t t = 0; t < 40; ++t) {
    EXPECT_EQ(a.frame_labels[t], !a.masks.frames[t].empty());
    abnormal += a.frame_labels[t];
  }
  EXPECT_GT(abnormal, 0u);
}
