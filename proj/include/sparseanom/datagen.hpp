#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparseanom/dictionary.hpp"
#include "sparseanom/evaluate.hpp"
#include "sparseanom/features.hpp"
#include "sparseanom/rng.hpp"

namespace sparseanom {

struct RecoveryInstance {
  Dictionary dict;
  Vector x_star;                     // k-sparse, length m
  std::vector<std::uint32_t> support;  // sorted
  Vector y;                          // D x_star + sigma * noise
  std::uint64_t seed = 0;
};

struct RecoveryConfig {
  std::size_t p = 0, m = 0, k = 0;
  double sigma = 0.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  // One Gaussian dictionary for every trial instead of one per trial.
  bool shared_dictionary = false;
  // Non-zero magnitudes are drawn from [min_magnitude, max_magnitude] with a
  // random sign.
  double min_magnitude = 0.5, max_magnitude = 1.5;
};

// Gaussian dictionary with normalised columns.
Matrix gaussian_dictionary(std::size_t p, std::size_t m, Rng& rng);

// Deterministic under seed. Requires k < p < m.
std::vector<RecoveryInstance> gen_recovery(const RecoveryConfig& cfg);
std::vector<RecoveryInstance> gen_recovery(std::size_t p, std::size_t m, std::size_t k, double sigma,
                                           std::size_t trials, std::uint64_t seed);

// A bright disc moving in a straight line; present on frames
// [start_frame, start_frame + length) while it overlaps the image.
struct BlobSpec {
  std::size_t start_frame = 0;
  std::size_t length = 10;
  double x0 = 0.0, y0 = 0.0;  // centre at start_frame
  double vx = 5.0, vy = 0.0;  // pixels per frame
  double radius = 4.0;
  float intensity = 1.0f;
};

struct SceneConfig {
  std::size_t frames = 200;
  std::size_t height = 90;
  std::size_t width = 115;
  double anomaly_rate = 0.2;  // target fraction of abnormal frames when blobs is empty
  std::uint64_t seed = 0;
  std::vector<BlobSpec> blobs;  // explicit anomalies; overrides anomaly_rate
  double noise = 0.01;
};

struct SyntheticScene {
  VideoTensor video;
  MaskSet masks;
  std::vector<bool> frame_labels;  // true = abnormal, equals !masks.frames[t].empty()
  std::vector<BlobSpec> blobs;
  std::uint64_t seed = 0;
};

// Smooth drifting sinusoidal background plus fast bright blobs. Frames must
// hold at least one default cube (23 x 15 x 5).
SyntheticScene gen_scene(const SceneConfig& cfg);
SyntheticScene gen_scene(std::size_t frames, std::size_t height, std::size_t width, double anomaly_rate,
                         std::uint64_t seed);

}  // namespace sparseanom
