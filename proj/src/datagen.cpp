#include "sparseanom/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparseanom/error.hpp"

namespace sparseanom {

Matrix gaussian_dictionary(std::size_t p, std::size_t m, Rng& rng) {
  Matrix d(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    double n = 0.0;
    do {
      for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, j) = rng.normal();
      n = d.col(j).norm();
    } while (n == 0.0);
    d.col(j) /= n;
  }
  return d;
}

std::vector<RecoveryInstance> gen_recovery(const RecoveryConfig& cfg) {
  if (!(cfg.k < cfg.p && cfg.p < cfg.m)) {
    throw Error(ErrorCode::invalid_argument, "recovery instances need k < p < m");
  }
  if (!(cfg.sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "sigma must be >= 0");
  if (!(cfg.min_magnitude > 0.0 && cfg.min_magnitude <= cfg.max_magnitude)) {
    throw Error(ErrorCode::invalid_argument, "bad magnitude range");
  }
  Rng rng(cfg.seed);
  std::optional<Dictionary> shared;
  if (cfg.shared_dictionary) shared.emplace(gaussian_dictionary(cfg.p, cfg.m, rng));

  std::vector<RecoveryInstance> out;
  out.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Dictionary dict = shared ? *shared : Dictionary(gaussian_dictionary(cfg.p, cfg.m, rng));
    auto picks = rng.sample_without_replacement(cfg.m, cfg.k);
    std::sort(picks.begin(), picks.end());
    Vector x = Vector::Zero(static_cast<Eigen::Index>(cfg.m));
    std::vector<std::uint32_t> support;
    for (std::size_t j : picks) {
      const double sign = (rng.next() & 1u) ? 1.0 : -1.0;
      x[static_cast<Eigen::Index>(j)] = sign * rng.uniform(cfg.min_magnitude, cfg.max_magnitude);
      support.push_back(static_cast<std::uint32_t>(j));
    }
    Vector y = dict.atoms() * x;
    if (cfg.sigma > 0.0) {
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += cfg.sigma * rng.normal();
    }
    out.push_back({std::move(dict), std::move(x), std::move(support), std::move(y), cfg.seed});
  }
  return out;
}

std::vector<RecoveryInstance> gen_recovery(std::size_t p, std::size_t m, std::size_t k, double sigma,
                                           std::size_t trials, std::uint64_t seed) {
  RecoveryConfig cfg;
  cfg.p = p;
  cfg.m = m;
  cfg.k = k;
  cfg.sigma = sigma;
  cfg.trials = trials;
  cfg.seed = seed;
  return gen_recovery(cfg);
}

namespace {

// Random event whose disc stays inside the frame for its whole duration.
BlobSpec random_blob(Rng& rng, std::size_t start, std::size_t length, std::size_t height, std::size_t width) {
  BlobSpec b;
  b.start_frame = start;
  b.length = length;
  b.radius = rng.uniform(4.0, 6.0);
  b.intensity = static_cast<float>(rng.uniform(0.9, 1.0));
  const double lo_x = b.radius, hi_x = static_cast<double>(width) - 1.0 - b.radius;
  const double lo_y = b.radius, hi_y = static_cast<double>(height) - 1.0 - b.radius;
  b.x0 = rng.uniform(lo_x, hi_x);
  b.y0 = rng.uniform(lo_y, hi_y);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  double dx = std::cos(angle), dy = std::sin(angle);
  // Distance available along (dx, dy) before leaving the admissible box.
  auto reach = [&](double ux, double uy) {
    double t = 1e300;
    if (ux > 0) t = std::min(t, (hi_x - b.x0) / ux);
    if (ux < 0) t = std::min(t, (lo_x - b.x0) / ux);
    if (uy > 0) t = std::min(t, (hi_y - b.y0) / uy);
    if (uy < 0) t = std::min(t, (lo_y - b.y0) / uy);
    return t;
  };
  double travel = reach(dx, dy);
  if (const double back = reach(-dx, -dy); back > travel) {
    dx = -dx;
    dy = -dy;
    travel = back;
  }
  const double steps = static_cast<double>(length > 1 ? length - 1 : 1);
  const double speed = std::min(rng.uniform(4.0, 6.0), travel / steps);
  b.vx = speed * dx;
  b.vy = speed * dy;
  return b;
}

}  // namespace

SyntheticScene gen_scene(const SceneConfig& cfg) {
  if (cfg.frames < 5 || cfg.height < 15 || cfg.width < 23) {
    throw Error(ErrorCode::invalid_argument, "scene must hold at least one 23x15x5 cube");
  }
  if (!(cfg.anomaly_rate >= 0.0 && cfg.anomaly_rate <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "anomaly_rate must be in [0, 1]");
  }
  Rng rng(cfg.seed);
  SyntheticScene scene;
  scene.seed = cfg.seed;
  scene.video = VideoTensor(cfg.frames, cfg.height, cfg.width);

  struct Wave {
    double fx, fy, omega, phase, amp;
  };
  std::vector<Wave> waves;
  for (double amp : {0.15, 0.10, 0.05}) {
    const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double freq = rng.uniform(0.01, 0.04);
    waves.push_back({freq * std::cos(dir), freq * std::sin(dir), rng.uniform(0.02, 0.08),
                     rng.uniform(0.0, 2.0 * std::numbers::pi), amp});
  }
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    for (std::size_t y = 0; y < cfg.height; ++y) {
      for (std::size_t x = 0; x < cfg.width; ++x) {
        double v = 0.5;
        for (const Wave& w : waves) {
          v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * static_cast<double>(x) + w.fy * static_cast<double>(y)) +
                                w.omega * static_cast<double>(t) + w.phase);
        }
        v += cfg.noise * rng.normal();
        scene.video.at(t, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  scene.blobs = cfg.blobs;
  if (scene.blobs.empty() && cfg.anomaly_rate > 0.0) {
    const auto target = static_cast<std::size_t>(std::llround(cfg.anomaly_rate * static_cast<double>(cfg.frames)));
    if (target > 0) {
      const std::size_t events = std::max<std::size_t>(1, (target + 14) / 15);
      const std::size_t segment = cfg.frames / events;
      const std::size_t per_event = std::max<std::size_t>(5, std::min(segment, target / events));
      for (std::size_t e = 0; e < events; ++e) {
        const std::size_t slack = segment - std::min(segment, per_event);
        const std::size_t start = e * segment + (slack ? static_cast<std::size_t>(rng.index(slack + 1)) : 0);
        const std::size_t length = std::min(per_event, cfg.frames - start);
        scene.blobs.push_back(random_blob(rng, start, length, cfg.height, cfg.width));
      }
    }
  }

  scene.masks.height = static_cast<std::uint32_t>(cfg.height);
  scene.masks.width = static_cast<std::uint32_t>(cfg.width);
  scene.masks.frames.assign(cfg.frames, FrameMask{scene.masks.height, scene.masks.width,
                                                  std::vector<std::uint8_t>(cfg.height * cfg.width, 0)});
  for (const BlobSpec& b : scene.blobs) {
    for (std::size_t k = 0; k < b.length; ++k) {
      const std::size_t t = b.start_frame + k;
      if (t >= cfg.frames) break;
      const double cx = b.x0 + b.vx * static_cast<double>(k);
      const double cy = b.y0 + b.vy * static_cast<double>(k);
      const double r2 = b.radius * b.radius;
      const auto y_lo = static_cast<long>(std::floor(cy - b.radius)), y_hi = static_cast<long>(std::ceil(cy + b.radius));
      const auto x_lo = static_cast<long>(std::floor(cx - b.radius)), x_hi = static_cast<long>(std::ceil(cx + b.radius));
      for (long y = std::max(0L, y_lo); y <= std::min<long>(y_hi, static_cast<long>(cfg.height) - 1); ++y) {
        for (long x = std::max(0L, x_lo); x <= std::min<long>(x_hi, static_cast<long>(cfg.width) - 1); ++x) {
          const double ddx = static_cast<double>(x) - cx, ddy = static_cast<double>(y) - cy;
          if (ddx * ddx + ddy * ddy <= r2) {
            scene.video.at(t, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = b.intensity;
            scene.masks.frames[t].pixels[static_cast<std::size_t>(y) * cfg.width + static_cast<std::size_t>(x)] = 1;
          }
        }
      }
    }
  }
  scene.frame_labels.resize(cfg.frames);
  for (std::size_t t = 0; t < cfg.frames; ++t) scene.frame_labels[t] = !scene.masks.frames[t].empty();
  return scene;
}

SyntheticScene gen_scene(std::size_t frames, std::size_t height, std::size_t width, double anomaly_rate,
                         std::uint64_t seed) {
  SceneConfig cfg;
  cfg.frames = frames;
  cfg.height = height;
  cfg.width = width;
  cfg.anomaly_rate = anomaly_rate;
  cfg.seed = seed;
  return gen_scene(cfg);
}

}  // namespace sparseanom
