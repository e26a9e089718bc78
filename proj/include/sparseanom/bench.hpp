#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparseanom/detect.hpp"
#include "sparseanom/encode.hpp"
#include "sparseanom/evaluate.hpp"

namespace sparseanom {

// One row of the code benchmark: encode time, mean ||y - Dx||^2 and mean
// density in percent of the atom count.
struct CodeBenchRow {
  Solver solver = Solver::omp;
  double seconds = 0.0;      // wall clock around the encode loop only
  double mean_error = 0.0;
  double density_pct = 0.0;  // |x_j| >= 1e-10
  double raw_density_pct = 0.0;  // x_j != 0
  std::string status = "ok";  // or the failure message
};

std::vector<CodeBenchRow> bench_codes(const Dictionary& dict, const RowMatrix& features,
                                      const std::vector<Solver>& solvers, const SolverConfig& cfg,
                                      std::size_t threads = 0);

std::string code_bench_to_csv(const std::vector<CodeBenchRow>& rows);

struct DetectBenchRow {
  std::string solver;
  Detector detector = Detector::re;
  double frame_auc = 0.0, eer = 0.0, pixel_auc = 0.0, edr = 0.0;
  std::string status = "ok";
};

struct DetectBenchOptions {
  std::uint32_t frame_span = 5;
  double overlap = 0.40;
  bool are_blockwise = false;
  std::size_t threads = 0;
};

// Every (solver, detector) pair; rows sorted by solver name then detector.
// Pixel columns are left at 0 with status noting it when truth has no masks.
std::vector<DetectBenchRow> bench_detect(const Dictionary& dict, const FeatureMatrix& features,
                                         const std::map<std::string, std::vector<SparseCode>>& codes_by_solver,
                                         std::vector<Detector> detectors, const GroundTruth& truth,
                                         const DetectBenchOptions& options);

std::string detect_bench_to_csv(const std::vector<DetectBenchRow>& rows);

}  // namespace sparseanom
