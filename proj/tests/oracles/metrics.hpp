#pragma once

// Rank-statistic and brute-force evaluation oracles.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "sparseanom/evaluate.hpp"

namespace oracle {

// Mann-Whitney U / (P N), ties counted one half.
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double wins = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (bool l : labels) neg += l ? 0 : 1;
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

struct PixelPoint {
  double threshold;
  std::size_t tp, fp;
};

// Recomputes, for every distinct feature score t (descending), the union of
// rects of features covering each frame with score >= t from scratch.
// A frame is detected when covered_true * 100 >= overlap_percent * |truth|.
inline std::vector<PixelPoint> brute_force_pixel(const sparseanom::ScoreSet& scores,
                                                 const sparseanom::GroundTruth& truth, int overlap_percent) {
  std::set<double, std::greater<>> thresholds(scores.per_feature.begin(), scores.per_feature.end());
  std::vector<PixelPoint> out;
  for (double t : thresholds) {
    PixelPoint point{t, 0, 0};
    for (const auto& [frame, abnormal] : truth.frame_labels) {
      std::vector<std::size_t> covering;
      for (std::size_t i = 0; i < scores.per_feature.size(); ++i) {
        const auto f0 = scores.provenance[i].frame_index;
        if (scores.per_feature[i] >= t && frame >= f0 && frame < f0 + scores.frame_span) covering.push_back(i);
      }
      if (!abnormal) {
        if (!covering.empty()) ++point.fp;
        continue;
      }
      const sparseanom::FrameMask& mask = truth.pixel_masks.at(frame);
      std::vector<bool> grid(mask.pixels.size(), false);
      for (std::size_t i : covering) {
        const auto& r = scores.provenance[i].rect;
        for (std::uint32_t y = r.y; y < r.y + r.h && y < mask.height; ++y) {
          for (std::uint32_t x = r.x; x < r.x + r.w && x < mask.width; ++x) grid[y * mask.width + x] = true;
        }
      }
      std::size_t hit = 0, total = 0;
      for (std::size_t px = 0; px < grid.size(); ++px) {
        total += mask.pixels[px];
        hit += (grid[px] && mask.pixels[px]) ? 1 : 0;
      }
      if (hit * 100 >= static_cast<std::size_t>(overlap_percent) * total) ++point.tp;
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace oracle
