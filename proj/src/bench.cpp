#include "sparseanom/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"

namespace sparseanom {

std::vector<CodeBenchRow> bench_codes(const Dictionary& dict, const RowMatrix& features,
                                      const std::vector<Solver>& solvers, const SolverConfig& cfg,
                                      std::size_t threads) {
  if (solvers.empty()) throw Error(ErrorCode::invalid_argument, "bench-codes needs at least one solver");
  std::vector<CodeBenchRow> rows;
  const auto n = static_cast<double>(features.rows());
  const auto m = static_cast<double>(dict.size());
  for (Solver solver : solvers) {
    CodeBenchRow row;
    row.solver = solver;
    try {
      const auto start = std::chrono::steady_clock::now();
      const auto codes = encode_all(solver, dict, features, cfg, threads);
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      double err = 0.0, dense = 0.0, raw = 0.0;
      for (const SparseCode& c : codes) {
        err += c.residual_norm * c.residual_norm;
        dense += static_cast<double>(c.nnz_above(kDensityCutoff));
        raw += static_cast<double>(c.nnz());
      }
      if (n > 0) {
        row.mean_error = err / n;
        row.density_pct = 100.0 * dense / (n * m);
        row.raw_density_pct = 100.0 * raw / (n * m);
      }
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {
std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}
}  // namespace

std::string code_bench_to_csv(const std::vector<CodeBenchRow>& rows) {
  std::ostringstream out;
  out << "solver,time_s,mean_error,density_pct,raw_density_pct,status\n";
  for (const auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.3f", r.seconds);
    out << to_string(r.solver) << ',' << secs << ',' << io::format_double(r.mean_error) << ','
        << io::format_double(r.density_pct) << ',' << io::format_double(r.raw_density_pct) << ','
        << csv_field(r.status) << '\n';
  }
  return out.str();
}

std::vector<DetectBenchRow> bench_detect(const Dictionary& dict, const FeatureMatrix& features,
                                         const std::map<std::string, std::vector<SparseCode>>& codes_by_solver,
                                         std::vector<Detector> detectors, const GroundTruth& truth,
                                         const DetectBenchOptions& options) {
  std::sort(detectors.begin(), detectors.end());
  detectors.erase(std::unique(detectors.begin(), detectors.end()), detectors.end());
  std::vector<DetectBenchRow> rows;
  for (const auto& [name, codes] : codes_by_solver) {
    for (Detector det : detectors) {
      DetectBenchRow row;
      row.solver = name;
      row.detector = det;
      try {
        DetectOptions dopt;
        dopt.are_blockwise = options.are_blockwise;
        dopt.threads = options.threads;
        auto scores = score_features(det, features, codes, dict, dopt);
        const ScoreSet set = aggregate_frames(std::move(scores), features.provenance, det, options.frame_span);
        const EvalReport frame = roc_frame(set, truth);
        row.frame_auc = frame.auc;
        row.eer = frame.eer;
        if (truth.has_masks()) {
          const EvalReport pixel = roc_pixel(set, truth, options.overlap);
          row.pixel_auc = pixel.auc;
          row.edr = pixel.edr.value_or(0.0);
        } else {
          row.status = "no masks: pixel columns not computed";
        }
      } catch (const Error& e) {
        row.status = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string detect_bench_to_csv(const std::vector<DetectBenchRow>& rows) {
  std::ostringstream out;
  out << "solver,detector,frame_auc,eer,pixel_auc,edr,status\n";
  for (const auto& r : rows) {
    out << r.solver << ',' << to_string(r.detector) << ',' << io::format_double(r.frame_auc) << ','
        << io::format_double(r.eer) << ',' << io::format_double(r.pixel_auc) << ',' << io::format_double(r.edr)
        << ',' << csv_field(r.status) << '\n';
  }
  return out.str();
}

}  // namespace sparseanom
