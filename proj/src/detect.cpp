#include "sparseanom/detect.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"
#include "sparseanom/parallel.hpp"

namespace sparseanom {
namespace {

void check_dim(std::span<const double> y, const Dictionary& dict) {
  if (y.size() != dict.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature length " + std::to_string(y.size()) + " != dictionary dimension " +
                    std::to_string(dict.dim()));
  }
}

void check_code(const SparseCode& code, const Dictionary& dict) {
  if (static_cast<std::size_t>(code.coeffs.size()) != dict.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "code length " + std::to_string(code.coeffs.size()) + " != atom count " +
                    std::to_string(dict.size()));
  }
}

Matrix range_basis(const Matrix& d, double rank_tol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(d);
  qr.setThreshold(rank_tol);
  return Matrix(qr.householderQ()).leftCols(qr.rank());
}

double projection_residual(const Matrix& q, std::span<const double> y) {
  // A basis spanning the whole space projects onto itself.
  if (static_cast<std::size_t>(q.cols()) == y.size()) return 0.0;
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const auto qc = col_span(q, c);
      kernels::axpy(-kernels::dot(qc, as_span(r)), qc, as_span(r));
    }
  }
  return std::sqrt(kernels::squared_norm(as_span(r)));
}

}  // namespace

const char* to_string(Detector d) noexcept {
  switch (d) {
    case Detector::re: return "re";
    case Detector::are: return "are";
    case Detector::mc: return "mc";
    case Detector::nc: return "nc";
  }
  return "?";
}

Detector parse_detector(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Detector d : {Detector::re, Detector::are, Detector::mc, Detector::nc}) {
    if (s == to_string(d)) return d;
  }
  throw Error(ErrorCode::invalid_argument, "unknown detector '" + name + "' (expected re|are|mc|nc)");
}

double score_re(std::span<const double> y, const SparseCode& code, const Dictionary& dict) {
  check_dim(y, dict);
  check_code(code, dict);
  const double r = residual_norm(dict, y, code.coeffs);
  return r * r;
}

double score_are(std::span<const double> y, const Dictionary& dict) {
  check_dim(y, dict);
  return AreScorer(dict, false)(y);
}

double score_mc(const SparseCode& code) {
  const double total = code.coeffs.lpNorm<1>();
  if (!(total > 0.0)) return 1.0;
  return std::clamp(1.0 - code.coeffs.cwiseAbs().maxCoeff() / total, 0.0, 1.0);
}

double score_nc(const SparseCode& code, const Dictionary& dict) {
  if (!dict.has_blocks()) throw Error(ErrorCode::missing_requirement, "NC requires blocked dictionary");
  check_code(code, dict);
  const double total = code.coeffs.lpNorm<1>();
  if (!(total > 0.0)) return 1.0;
  double best = 0.0;
  for (const Block& b : dict.blocks()) {
    best = std::max(best, code.coeffs.segment(b.start, b.length).lpNorm<1>());
  }
  return std::clamp(1.0 - best / total, 0.0, 1.0);
}

AreScorer::AreScorer(const Dictionary& dict, bool blockwise, double rank_tol) : dim_(dict.dim()) {
  if (!blockwise) {
    bases_.push_back(range_basis(dict.atoms(), rank_tol));
    return;
  }
  if (!dict.has_blocks()) throw Error(ErrorCode::missing_requirement, "blockwise ARE requires blocked dictionary");
  for (const Block& b : dict.blocks()) {
    bases_.push_back(range_basis(dict.atoms().middleCols(b.start, b.length), rank_tol));
  }
}

double AreScorer::operator()(std::span<const double> y) const {
  if (y.size() != dim_) throw Error(ErrorCode::dimension_mismatch, "ARE: feature length mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const Matrix& q : bases_) best = std::min(best, projection_residual(q, y));
  return best;
}

std::size_t AreScorer::max_rank() const {
  std::size_t r = 0;
  for (const Matrix& q : bases_) r = std::max<std::size_t>(r, static_cast<std::size_t>(q.cols()));
  return r;
}

ScoreSet aggregate_frames(std::vector<double> per_feature, std::vector<Provenance> provenance,
                          Detector method, std::uint32_t frame_span) {
  if (per_feature.size() != provenance.size()) {
    throw Error(ErrorCode::dimension_mismatch, "score count differs from provenance count");
  }
  if (frame_span < 1) throw Error(ErrorCode::invalid_argument, "frame span must be >= 1");
  ScoreSet out;
  out.method = method;
  out.frame_span = frame_span;
  for (std::size_t i = 0; i < per_feature.size(); ++i) {
    for (std::uint32_t k = 0; k < frame_span; ++k) {
      const std::uint32_t f = provenance[i].frame_index + k;
      auto [it, inserted] = out.per_frame.try_emplace(f, per_feature[i]);
      if (!inserted) it->second = std::max(it->second, per_feature[i]);
    }
  }
  out.per_feature = std::move(per_feature);
  out.provenance = std::move(provenance);
  return out;
}

std::vector<double> score_features(Detector method, const FeatureMatrix& features,
                                   const std::vector<SparseCode>& codes, const Dictionary& dict,
                                   const DetectOptions& options) {
  const std::size_t n = features.rows();
  if (features.dim() != dict.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature dimension " + std::to_string(features.dim()) + " != dictionary dimension " +
                    std::to_string(dict.dim()));
  }
  if (method != Detector::are && codes.size() != n) {
    throw Error(ErrorCode::dimension_mismatch,
                std::to_string(codes.size()) + " codes for " + std::to_string(n) + " features");
  }
  if (method == Detector::nc && !dict.has_blocks()) {
    throw Error(ErrorCode::missing_requirement, "NC requires blocked dictionary");
  }
  std::vector<double> scores(n);
  std::optional<AreScorer> are;
  if (method == Detector::are) are.emplace(dict, options.are_blockwise);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto y = row_span(features.values, static_cast<Eigen::Index>(i));
    switch (method) {
      case Detector::re: scores[i] = score_re(y, codes[i], dict); break;
      case Detector::are: scores[i] = (*are)(y); break;
      case Detector::mc: scores[i] = score_mc(codes[i]); break;
      case Detector::nc: scores[i] = score_nc(codes[i], dict); break;
    }
  });
  return scores;
}

std::string scores_to_csv(const ScoreSet& s) {
  std::ostringstream out;
  out << "feature_id,frame,patch_row,patch_col,score\n";
  for (std::size_t i = 0; i < s.per_feature.size(); ++i) {
    const Provenance& p = s.provenance[i];
    out << i << ',' << p.frame_index << ',' << p.patch_row << ',' << p.patch_col << ','
        << io::format_double(s.per_feature[i]) << '\n';
  }
  return out.str();
}

std::string frame_scores_to_csv(const ScoreSet& s) {
  std::ostringstream out;
  out << "frame,score\n";
  for (const auto& [f, v] : s.per_frame) out << f << ',' << io::format_double(v) << '\n';
  return out.str();
}

std::vector<FeatureScoreRow> parse_scores_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("feature_id,frame,patch_row,patch_col,score", 0) != 0) {
    throw Error(ErrorCode::malformed, source + ": missing scores header");
  }
  std::vector<FeatureScoreRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    FeatureScoreRow r{};
    char c1, c2, c3, c4;
    if (!(ls >> r.feature_id >> c1 >> r.frame >> c2 >> r.patch_row >> c3 >> r.patch_col >> c4 >> r.score) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw Error(ErrorCode::malformed, source + ": bad row at line " + std::to_string(lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sparseanom
