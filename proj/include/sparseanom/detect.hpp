#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparseanom/dictionary.hpp"
#include "sparseanom/features.hpp"
#include "sparseanom/sparse_code.hpp"

namespace sparseanom {

// Every score follows "higher = more anomalous".
enum class Detector { re, are, mc, nc };

const char* to_string(Detector d) noexcept;
// Accepts re|are|mc|nc (case-insensitive); throws Error(invalid_argument).
Detector parse_detector(const std::string& name);

// ||y - D alpha||_2^2
double score_re(std::span<const double> y, const SparseCode& code, const Dictionary& dict);

// ||y - D D^+ y||_2, the least-squares projection residual. For a full-row-rank
// overcomplete D this is identically zero.
double score_are(std::span<const double> y, const Dictionary& dict);

// 1 - max_j |a_j| / ||a||_1; 1 for the zero code.
double score_mc(const SparseCode& code);

// 1 - max_b (sum_{j in b} |a_j|) / ||a||_1; 1 for the zero code.
// Throws Error(missing_requirement) when dict has no blocks.
double score_nc(const SparseCode& code, const Dictionary& dict);

// Precomputed orthonormal range bases for repeated ARE scoring. With
// blockwise = true the score is the minimum projection residual over the
// dictionary's blocks.
// A full-rank basis yields exactly 0 rather than rounding noise.
class AreScorer {
 public:
  AreScorer(const Dictionary& dict, bool blockwise, double rank_tol = 1e-10);
  double operator()(std::span<const double> y) const;
  // Rank of the full dictionary (or of the largest block when blockwise).
  std::size_t max_rank() const;

 private:
  std::size_t dim_;
  std::vector<Matrix> bases_;
};

struct ScoreSet {
  Detector method = Detector::re;
  std::vector<double> per_feature;
  std::vector<Provenance> provenance;
  // Number of consecutive frames each feature covers, starting at its
  // frame_index.
  std::uint32_t frame_span = 1;
  std::map<std::uint32_t, double> per_frame;
};

// per_frame[f] = max score over features covering frame f.
ScoreSet aggregate_frames(std::vector<double> per_feature, std::vector<Provenance> provenance,
                          Detector method, std::uint32_t frame_span = 1);

struct DetectOptions {
  bool are_blockwise = false;
  std::size_t threads = 0;
};

// Scores every feature with one detector. codes may be empty for ARE.
std::vector<double> score_features(Detector method, const FeatureMatrix& features,
                                   const std::vector<SparseCode>& codes, const Dictionary& dict,
                                   const DetectOptions& options = {});

// feature_id,frame,patch_row,patch_col,score
std::string scores_to_csv(const ScoreSet& scores);
// frame,score
std::string frame_scores_to_csv(const ScoreSet& scores);

struct FeatureScoreRow {
  std::uint32_t feature_id, frame, patch_row, patch_col;
  double score;
};
std::vector<FeatureScoreRow> parse_scores_csv(const std::string& text, const std::string& source);

}  // namespace sparseanom
