#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparseanom/detect.hpp"

namespace sparseanom {

// Binary per-pixel mask of one frame, row-major, 0/1.
struct FrameMask {
  std::uint32_t height = 0, width = 0;
  std::vector<std::uint8_t> pixels;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool operator==(const FrameMask&) const = default;
};

// Masks for every frame of a clip.
struct MaskSet {
  std::uint32_t height = 0, width = 0;
  std::vector<FrameMask> frames;
  bool operator==(const MaskSet&) const = default;
};

// "SAMSK001": u32 T, H, W; per frame u32 run count followed by run lengths,
// alternating zero-runs and one-runs starting with a (possibly empty) zero-run.
void save_masks(const MaskSet& masks, const std::filesystem::path& path);
MaskSet load_masks(const std::filesystem::path& path);

struct GroundTruth {
  std::map<std::uint32_t, bool> frame_labels;  // true = abnormal
  std::map<std::uint32_t, FrameMask> pixel_masks;  // empty when unavailable

  bool has_masks() const { return !pixel_masks.empty(); }
  // Labels follow the masks: abnormal iff the mask has any pixel set.
  static GroundTruth from_masks(const MaskSet& masks);
};

// frame,label rows; label is 0/1 or normal/abnormal.
GroundTruth parse_labels_csv(const std::string& text, const std::string& source);

enum class EvalLevel { frame, pixel };

struct RocPoint {
  double threshold = 0.0;  // +inf for the (0,0) endpoint, -inf for an appended (1,1)
  double fpr = 0.0;
  double tpr = 0.0;
};

struct EqualPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct EvalReport {
  EvalLevel level = EvalLevel::frame;
  std::vector<RocPoint> roc;
  double auc = 0.0;
  double eer = 0.0;            // fpr at the fpr = 1 - tpr crossing
  std::optional<double> edr;   // pixel level: tpr at that crossing
  EqualPoint equal_point;
};

// Trapezoidal area. Points must be ordered with non-decreasing fpr; (0,0)
// and (1,1) are added when missing. Throws Error(invalid_argument) for
// fewer than two points.
double auc(std::vector<RocPoint> points);
// Linear interpolation of the first sign change of fpr - (1 - tpr).
EqualPoint equal_error_point(std::vector<RocPoint> points);
double eer(std::vector<RocPoint> points);

// Frame-level ROC: a frame is positive at threshold t iff its score >= t.
EvalReport roc_frame(const ScoreSet& scores, const GroundTruth& truth);

// Pixel-level ROC: an abnormal frame is a true positive iff the union of the
// rects of its features scoring >= t covers at least `overlap` of the truly
// abnormal pixels; a normal frame is a false positive iff any feature
// covering it scores >= t.
EvalReport roc_pixel(const ScoreSet& scores, const GroundTruth& truth, double overlap = 0.40);

std::string report_to_json(const EvalReport& report);
std::string roc_to_csv(const EvalReport& report);

}  // namespace sparseanom
