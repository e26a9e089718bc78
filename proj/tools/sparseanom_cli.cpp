// sparseanom: batch pipeline for sparse-coding based abnormal event detection.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparseanom/bench.hpp"
#include "sparseanom/binary_io.hpp"
#include "sparseanom/datagen.hpp"
#include "sparseanom/detect.hpp"
#include "sparseanom/dictionary.hpp"
#include "sparseanom/encode.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/evaluate.hpp"
#include "sparseanom/features.hpp"
#include "sparseanom/kernels.hpp"
#include "sparseanom/sparse_code.hpp"

namespace fs = std::filesystem;
using namespace sparseanom;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct SolverOptions {
  std::string solver = "omp";
  SolverConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--max-iter", cfg.pursuit.max_iter, "Greedy iteration cap (0 = coder default)");
    cmd->add_option("--residual-tol", cfg.pursuit.residual_tol, "Greedy stopping residual norm");
    cmd->add_option("--stomp-threshold", cfg.pursuit.stomp_threshold, "StOMP threshold factor t");
    cmd->add_option("--stomp-stages", cfg.pursuit.stomp_stages, "StOMP stage count");
    cmd->add_option("--lambda", cfg.convex.lambda, "Lasso weight (<= 0: 0.1 * ||D^T y||_inf)");
    cmd->add_option("--epsilon", cfg.convex.epsilon, "Basis-pursuit noise bound");
    cmd->add_option("--convex-max-iter", cfg.convex.max_iter, "Convex solver iteration cap");
    cmd->add_option("--convex-tol", cfg.convex.tol, "Convex solver tolerance");
    cmd->add_option("--rho", cfg.convex.rho, "ADMM penalty");
  }
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::invalid_argument, std::string("missing --") + what);
  if (!fs::exists(path)) throw Error(ErrorCode::io, std::string(what) + " file not found: " + path);
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

GroundTruth load_truth(const std::string& masks, const std::string& labels) {
  if (!masks.empty()) {
    require_file(masks, "masks");
    return GroundTruth::from_masks(load_masks(masks));
  }
  if (!labels.empty()) {
    require_file(labels, "labels");
    const auto bytes = io::read_file(labels);
    return parse_labels_csv(std::string(bytes.begin(), bytes.end()), labels);
  }
  throw Error(ErrorCode::invalid_argument, "ground truth needs --masks or --labels");
}

std::string labels_to_csv(const std::vector<bool>& labels) {
  std::ostringstream out;
  out << "frame,label\n";
  for (std::size_t t = 0; t < labels.size(); ++t) out << t << ',' << (labels[t] ? 1 : 0) << '\n';
  return out.str();
}

// ---------------------------------------------------------------- synth-recovery
struct SynthRecoveryArgs {
  std::size_t p = 32, m = 64, k = 4, trials = 100;
  double sigma = 0.0;
  std::string dict, signals, truth;
};

void run_synth_recovery(const SynthRecoveryArgs& a, const Common& c) {
  RecoveryConfig cfg;
  cfg.p = a.p;
  cfg.m = a.m;
  cfg.k = a.k;
  cfg.sigma = a.sigma;
  cfg.trials = a.trials;
  cfg.seed = c.seed;
  cfg.shared_dictionary = true;
  const auto instances = gen_recovery(cfg);

  FeatureMatrix signals;
  signals.values.resize(static_cast<Eigen::Index>(instances.size()), static_cast<Eigen::Index>(a.p));
  CodeSet truth;
  truth.atom_count = a.m;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    signals.values.row(static_cast<Eigen::Index>(i)) = inst.y.transpose();
    Provenance prov;
    prov.frame_index = static_cast<std::uint32_t>(i);
    signals.provenance.push_back(prov);
    truth.codes.push_back(make_code(inst.dict, as_span(inst.y), inst.x_star));
  }
  save_dictionary(instances.front().dict, a.dict);
  save_features(signals, a.signals);
  if (!a.truth.empty()) save_codes(truth, a.truth);
  std::printf("synth-recovery: %zu trials, p=%zu m=%zu k=%zu sigma=%g\n", instances.size(), a.p, a.m, a.k,
              a.sigma);
}

// ---------------------------------------------------------------- synth-video
struct SynthVideoArgs {
  std::size_t frames = 200, height = 90, width = 115;
  double anomaly_rate = 0.2, noise = 0.01;
  std::string out, masks, labels;
};

void run_synth_video(const SynthVideoArgs& a, const Common& c) {
  SceneConfig cfg;
  cfg.frames = a.frames;
  cfg.height = a.height;
  cfg.width = a.width;
  cfg.anomaly_rate = a.anomaly_rate;
  cfg.noise = a.noise;
  cfg.seed = c.seed;
  const SyntheticScene scene = gen_scene(cfg);
  save_video(scene.video, a.out);
  if (!a.masks.empty()) save_masks(scene.masks, a.masks);
  if (!a.labels.empty()) io::write_text(a.labels, labels_to_csv(scene.frame_labels));
  std::size_t abnormal = 0;
  for (bool b : scene.frame_labels) abnormal += b ? 1 : 0;
  std::printf("synth-video: %zu frames %zux%zu, %zu abnormal, %zu events\n", a.frames, a.height, a.width, abnormal,
              scene.blobs.size());
}

// ---------------------------------------------------------------- extract
struct ExtractArgs {
  std::string video, out, pca_fit, pca;
  std::size_t pca_k = 100;
  CubeGeometry geometry;
  DescriptorConfig descriptor;
};

void run_extract(const ExtractArgs& a, const Common& c) {
  require_file(a.video, "video");
  if (!a.pca_fit.empty() && !a.pca.empty()) {
    throw Error(ErrorCode::invalid_argument, "--pca-fit and --pca are mutually exclusive");
  }
  const VideoTensor video = load_video_any(a.video);
  FeatureMatrix features = extract_features(video, a.geometry, a.descriptor, c.threads);
  const std::size_t raw_dim = features.dim();
  std::string pca_note = "none";
  if (!a.pca_fit.empty()) {
    const PcaModel model = pca_fit(features.values, a.pca_k);
    save_pca(model, a.pca_fit);
    features = pca_apply(model, features);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "fit k=%zu explained=%.4f", model.output_dim(), model.explained_ratio());
    pca_note = buf;
  } else if (!a.pca.empty()) {
    require_file(a.pca, "pca");
    const PcaModel model = load_pca(a.pca);
    features = pca_apply(model, features);
    pca_note = "applied k=" + std::to_string(model.output_dim());
  }
  save_features(features, a.out);
  std::printf("extract: %zu frames -> %zu features, dim %zu -> %zu, pca %s\n", video.frames(), features.rows(),
              raw_dim, features.dim(), pca_note.c_str());
}

// ---------------------------------------------------------------- train
struct TrainArgs {
  std::string features, out, log_csv, csv;
  std::size_t blocks = 10;
  TrainConfig cfg;
};

void run_train(TrainArgs a, const Common& c) {
  require_file(a.features, "features");
  const FeatureMatrix features = load_features(a.features);
  a.cfg.seed = c.seed;
  a.cfg.threads = c.threads;
  TrainResult result = ksvd_train(features.values, a.cfg);
  Dictionary dict = a.blocks > 0 ? result.dictionary.with_blocks(equal_blocks(result.dictionary.size(), a.blocks))
                                 : result.dictionary;
  save_dictionary(dict, a.out);
  if (!a.csv.empty()) io::write_text(a.csv, dictionary_to_csv(dict));
  if (!a.log_csv.empty()) {
    std::ostringstream log;
    log << "sweep,error\n0," << io::format_double(result.initial_error) << '\n';
    for (std::size_t s = 0; s < result.sweep_errors.size(); ++s) {
      log << s + 1 << ',' << io::format_double(result.sweep_errors[s]) << '\n';
    }
    io::write_text(a.log_csv, log.str());
  }
  const double final_error = result.sweep_errors.empty() ? result.initial_error : result.sweep_errors.back();
  std::printf("train: %zu features dim %zu -> %zu atoms, %zu blocks, %zu sweeps, error %.6g -> %.6g, %zu replaced\n",
              features.rows(), features.dim(), dict.size(), dict.blocks().size(), result.sweep_errors.size(),
              result.initial_error, final_error, result.replaced_atoms);
}

// ---------------------------------------------------------------- encode
struct EncodeArgs {
  std::string features, dict, out, csv;
  SolverOptions solver;
};

void run_encode(const EncodeArgs& a, const Common& c) {
  require_file(a.features, "features");
  require_file(a.dict, "dict");
  const Solver solver = parse_solver(a.solver.solver);
  const FeatureMatrix features = load_features(a.features);
  const Dictionary dict = load_dictionary(a.dict);
  const auto start = std::chrono::steady_clock::now();
  CodeSet codes;
  codes.atom_count = dict.size();
  codes.codes = encode_all(solver, dict, features.values, a.solver.cfg, c.threads);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_codes(codes, a.out);
  if (!a.csv.empty()) io::write_text(a.csv, codes_to_csv(codes));
  double nnz = 0.0;
  for (const auto& code : codes.codes) nnz += static_cast<double>(code.nnz_above(kDensityCutoff));
  const double rows = static_cast<double>(std::max<std::size_t>(codes.codes.size(), 1));
  std::printf("encode: %s %zu codes, mean nnz %.3f, %.3f s\n", to_string(solver), codes.codes.size(), nnz / rows,
              seconds);
}

// ---------------------------------------------------------------- detect
struct DetectArgs {
  std::string features, dict, codes, detector = "re", out, frame_out, flags_out;
  std::uint32_t frame_span = 5;
  bool are_blockwise = false;
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

void run_detect(const DetectArgs& a, const Common& c) {
  require_file(a.features, "features");
  require_file(a.dict, "dict");
  const Detector detector = parse_detector(a.detector);
  const FeatureMatrix features = load_features(a.features);
  const Dictionary dict = load_dictionary(a.dict);
  if (detector == Detector::nc && !dict.has_blocks()) {
    throw Error(ErrorCode::missing_requirement, "NC requires blocked dictionary");
  }
  CodeSet codes;
  if (detector != Detector::are) {
    require_file(a.codes, "codes");
    codes = load_codes(a.codes);
    if (codes.codes.size() != features.rows()) {
      throw Error(ErrorCode::dimension_mismatch, "codes file has " + std::to_string(codes.codes.size()) +
                                                     " rows, features file has " + std::to_string(features.rows()));
    }
    if (codes.atom_count != dict.size()) {
      throw Error(ErrorCode::dimension_mismatch, "codes atom count " + std::to_string(codes.atom_count) +
                                                     " != dictionary size " + std::to_string(dict.size()));
    }
  } else if (!a.are_blockwise && dict.size() > dict.dim()) {
    const AreScorer probe(dict, false);
    if (probe.max_rank() == dict.dim()) {
      std::fprintf(stderr,
                   "warning: dictionary spans the feature space (rank %zu); ARE is identically zero. "
                   "Use --are-blockwise.\n",
                   dict.dim());
    }
  }
  DetectOptions options;
  options.are_blockwise = a.are_blockwise;
  options.threads = c.threads;
  auto per_feature = score_features(detector, features, codes.codes, dict, options);
  const ScoreSet scores = aggregate_frames(std::move(per_feature), features.provenance, detector, a.frame_span);
  io::write_text(a.out, scores_to_csv(scores));
  if (!a.frame_out.empty()) io::write_text(a.frame_out, frame_scores_to_csv(scores));
  std::size_t flagged = 0;
  if (!std::isnan(a.threshold)) {
    std::ostringstream flags;
    flags << "frame,score,abnormal\n";
    for (const auto& [frame, score] : scores.per_frame) {
      const bool abnormal = score >= a.threshold;
      flagged += abnormal ? 1 : 0;
      flags << frame << ',' << io::format_double(score) << ',' << (abnormal ? 1 : 0) << '\n';
    }
    if (!a.flags_out.empty()) io::write_text(a.flags_out, flags.str());
  }
  std::printf("detect: %s %zu features -> %zu frames", to_string(detector), scores.per_feature.size(),
              scores.per_frame.size());
  if (!std::isnan(a.threshold)) std::printf(", %zu flagged at %g", flagged, a.threshold);
  std::printf("\n");
}

// ---------------------------------------------------------------- evaluate
struct EvaluateArgs {
  std::string scores, features, masks, labels, out, pixel_out, roc_csv, pixel_roc_csv;
  std::uint32_t frame_span = 5;
  double overlap = 0.40;
};

void run_evaluate(const EvaluateArgs& a, const Common&) {
  require_file(a.scores, "scores");
  const auto bytes = io::read_file(a.scores);
  const auto rows = parse_scores_csv(std::string(bytes.begin(), bytes.end()), a.scores);
  std::vector<double> per_feature;
  std::vector<Provenance> provenance;
  for (const auto& row : rows) {
    per_feature.push_back(row.score);
    Provenance p;
    p.frame_index = row.frame;
    p.patch_row = row.patch_row;
    p.patch_col = row.patch_col;
    provenance.push_back(p);
  }
  if (!a.features.empty()) {
    require_file(a.features, "features");
    const FeatureMatrix features = load_features(a.features);
    if (features.rows() != rows.size()) {
      throw Error(ErrorCode::dimension_mismatch, "scores file has " + std::to_string(rows.size()) +
                                                     " rows, features file has " + std::to_string(features.rows()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Provenance& f = features.provenance[i];
      if (f.frame_index != provenance[i].frame_index || f.patch_row != provenance[i].patch_row ||
          f.patch_col != provenance[i].patch_col) {
        throw Error(ErrorCode::dimension_mismatch,
                    "scores row " + std::to_string(i) + " does not match the features provenance");
      }
      provenance[i] = f;
    }
  }
  const GroundTruth truth = load_truth(a.masks, a.labels);
  const ScoreSet scores = aggregate_frames(std::move(per_feature), std::move(provenance), Detector::re, a.frame_span);
  const EvalReport frame = roc_frame(scores, truth);
  io::write_text(a.out, report_to_json(frame));
  if (!a.roc_csv.empty()) io::write_text(a.roc_csv, roc_to_csv(frame));
  std::printf("evaluate: %zu frames, frame AUC %.4f EER %.4f", scores.per_frame.size(), frame.auc, frame.eer);
  if (!a.pixel_out.empty() || !a.pixel_roc_csv.empty()) {
    if (!truth.has_masks()) throw Error(ErrorCode::missing_requirement, "pixel-level evaluation needs --masks");
    if (a.features.empty()) throw Error(ErrorCode::missing_requirement, "pixel-level evaluation needs --features");
    const EvalReport pixel = roc_pixel(scores, truth, a.overlap);
    if (!a.pixel_out.empty()) io::write_text(a.pixel_out, report_to_json(pixel));
    if (!a.pixel_roc_csv.empty()) io::write_text(a.pixel_roc_csv, roc_to_csv(pixel));
    std::printf(", pixel AUC %.4f EDR %.4f", pixel.auc, pixel.edr.value_or(0.0));
  }
  std::printf("\n");
}

// ---------------------------------------------------------------- bench-codes
struct BenchCodesArgs {
  std::string features, dict, out;
  std::vector<std::string> solvers{"mp", "omp", "stomp", "bp", "lasso"};
  SolverOptions solver;
};

void run_bench_codes(const BenchCodesArgs& a, const Common& c) {
  require_file(a.features, "features");
  require_file(a.dict, "dict");
  std::vector<Solver> solvers;
  for (const auto& name : split_list(a.solvers)) solvers.push_back(parse_solver(name));
  const FeatureMatrix features = load_features(a.features);
  const Dictionary dict = load_dictionary(a.dict);
  const auto rows = bench_codes(dict, features.values, solvers, a.solver.cfg, c.threads);
  io::write_text(a.out, code_bench_to_csv(rows));
  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.status == "ok" ? 0 : 1;
  std::printf("bench-codes: %zu solvers on %zu features, %zu failed\n", rows.size(), features.rows(), failed);
}

// ---------------------------------------------------------------- bench-detect
struct BenchDetectArgs {
  std::string features, dict, masks, labels, out;
  std::vector<std::string> codes;  // name=path
  std::vector<std::string> detectors{"re", "are", "mc", "nc"};
  std::uint32_t frame_span = 5;
  double overlap = 0.40;
  bool are_blockwise = false;
};

void run_bench_detect(const BenchDetectArgs& a, const Common& c) {
  require_file(a.features, "features");
  require_file(a.dict, "dict");
  if (a.codes.empty()) throw Error(ErrorCode::invalid_argument, "bench-detect needs at least one --codes name=path");
  const FeatureMatrix features = load_features(a.features);
  const Dictionary dict = load_dictionary(a.dict);
  std::map<std::string, std::vector<SparseCode>> codes_by_solver;
  for (const auto& spec : a.codes) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::invalid_argument, "--codes expects name=path, got '" + spec + "'");
    }
    const std::string path = spec.substr(eq + 1);
    require_file(path, "codes");
    CodeSet set = load_codes(path);
    if (set.codes.size() != features.rows()) {
      throw Error(ErrorCode::dimension_mismatch, "codes file " + path + " has " + std::to_string(set.codes.size()) +
                                                     " rows, features file has " + std::to_string(features.rows()));
    }
    codes_by_solver[spec.substr(0, eq)] = std::move(set.codes);
  }
  std::vector<Detector> detectors;
  for (const auto& name : split_list(a.detectors)) detectors.push_back(parse_detector(name));
  const GroundTruth truth = load_truth(a.masks, a.labels);
  DetectBenchOptions options;
  options.frame_span = a.frame_span;
  options.overlap = a.overlap;
  options.are_blockwise = a.are_blockwise;
  options.threads = c.threads;
  const auto rows = bench_detect(dict, features, codes_by_solver, detectors, truth, options);
  io::write_text(a.out, detect_bench_to_csv(rows));
  std::printf("bench-detect: %zu solvers x %zu detectors -> %zu rows\n", codes_by_solver.size(),
              rows.size() / std::max<std::size_t>(codes_by_solver.size(), 1), rows.size());
}

void add_geometry(CLI::App* cmd, ExtractArgs& a) {
  cmd->add_option("--patch-w", a.geometry.patch_w, "Cube width in pixels");
  cmd->add_option("--patch-h", a.geometry.patch_h, "Cube height in pixels");
  cmd->add_option("--depth", a.geometry.depth, "Cube depth in frames");
  cmd->add_option("--stride-x", a.geometry.stride_x, "Horizontal stride (0 = patch width)");
  cmd->add_option("--stride-y", a.geometry.stride_y, "Vertical stride (0 = patch height)");
  cmd->add_option("--stride-t", a.geometry.stride_t, "Temporal stride (0 = depth)");
  cmd->add_option("--cells-x", a.descriptor.cells_x, "Descriptor cells across");
  cmd->add_option("--cells-y", a.descriptor.cells_y, "Descriptor cells down");
  cmd->add_option("--cells-t", a.descriptor.cells_t, "Descriptor cells in time");
  cmd->add_option("--raw-dim", a.descriptor.raw_dim, "Descriptor length before PCA");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-coding abnormal event detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI config file; sections name subcommands, flags win")
      ->envname("SPARSEANOM_CONFIG");

  Common common;
  std::string isa;
  app.add_option("--seed", common.seed, "Seed for every random choice");
  app.add_option("--threads", common.threads, "Worker threads (0 = all cores)");
  app.add_option("--isa", isa, "Kernel variant: scalar|avx2|neon (default: best available)");

  SynthRecoveryArgs sr;
  auto* c_sr = app.add_subcommand("synth-recovery", "Gaussian dictionary plus k-sparse signals");
  c_sr->add_option("--p", sr.p, "Signal dimension");
  c_sr->add_option("--m", sr.m, "Atom count");
  c_sr->add_option("--k", sr.k, "Sparsity of x*");
  c_sr->add_option("--sigma", sr.sigma, "Noise standard deviation");
  c_sr->add_option("--trials", sr.trials, "Number of signals");
  c_sr->add_option("--dict", sr.dict, "Output dictionary (SADICT01)")->required();
  c_sr->add_option("--signals", sr.signals, "Output signals (SAFEA001)")->required();
  c_sr->add_option("--truth", sr.truth, "Output ground-truth codes (SACODE01)");

  SynthVideoArgs sv;
  auto* c_sv = app.add_subcommand("synth-video", "Synthetic scene with moving-blob anomalies");
  c_sv->add_option("--frames", sv.frames, "Frame count");
  c_sv->add_option("--height", sv.height, "Frame height");
  c_sv->add_option("--width", sv.width, "Frame width");
  c_sv->add_option("--anomaly-rate", sv.anomaly_rate, "Target fraction of abnormal frames");
  c_sv->add_option("--noise", sv.noise, "Background noise standard deviation");
  c_sv->add_option("--out", sv.out, "Output video (SAVID001)")->required();
  c_sv->add_option("--masks", sv.masks, "Output masks (SAMSK001)");
  c_sv->add_option("--labels", sv.labels, "Output frame labels CSV");

  ExtractArgs ex;
  auto* c_ex = app.add_subcommand("extract", "Spatio-temporal gradient features");
  c_ex->add_option("--video", ex.video, "SAVID001 file or directory of PGM frames")->required();
  c_ex->add_option("--out", ex.out, "Output features (SAFEA001)")->required();
  c_ex->add_option("--pca-fit", ex.pca_fit, "Fit PCA on these features and save the model here");
  c_ex->add_option("--pca-k", ex.pca_k, "PCA output dimension");
  c_ex->add_option("--pca", ex.pca, "Apply an existing PCA model");
  add_geometry(c_ex, ex);

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "K-SVD dictionary learning");
  c_tr->add_option("--features", tr.features, "Training features (SAFEA001)")->required();
  c_tr->add_option("--out", tr.out, "Output dictionary (SADICT01)")->required();
  c_tr->add_option("--atoms", tr.cfg.atom_count, "Atom count");
  c_tr->add_option("--sparsity", tr.cfg.sparsity, "Non-zeros per training code");
  c_tr->add_option("--sweeps", tr.cfg.sweeps, "Maximum sweeps");
  c_tr->add_option("--tol", tr.cfg.tol, "Relative improvement stopping tolerance");
  c_tr->add_option("--blocks", tr.blocks, "Equal contiguous atom blocks (0 = none)");
  c_tr->add_option("--log-csv", tr.log_csv, "Per-sweep error CSV");
  c_tr->add_option("--csv", tr.csv, "Dictionary atoms as CSV");

  EncodeArgs en;
  auto* c_en = app.add_subcommand("encode", "Sparse-code features against a dictionary");
  c_en->add_option("--features", en.features, "Features (SAFEA001)")->required();
  c_en->add_option("--dict", en.dict, "Dictionary (SADICT01)")->required();
  c_en->add_option("--solver", en.solver.solver, "mp|omp|stomp|bp|lasso");
  c_en->add_option("--out", en.out, "Output codes (SACODE01)")->required();
  c_en->add_option("--csv", en.csv, "Codes as CSV");
  en.solver.add(c_en);

  DetectArgs de;
  auto* c_de = app.add_subcommand("detect", "Score features with a detection measurement");
  c_de->add_option("--features", de.features, "Features (SAFEA001)")->required();
  c_de->add_option("--dict", de.dict, "Dictionary (SADICT01)")->required();
  c_de->add_option("--codes", de.codes, "Codes (SACODE01); not needed for ARE");
  c_de->add_option("--detector", de.detector, "re|are|mc|nc");
  c_de->add_option("--out", de.out, "Per-feature scores CSV")->required();
  c_de->add_option("--frame-out", de.frame_out, "Per-frame scores CSV");
  c_de->add_option("--frame-span", de.frame_span, "Frames covered by each feature");
  c_de->add_flag("--are-blockwise", de.are_blockwise, "ARE over each block, minimum residual");
  c_de->add_option("--threshold", de.threshold, "Operating threshold for frame flags");
  c_de->add_option("--flags-out", de.flags_out, "Frame flags CSV at --threshold");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Frame- and pixel-level ROC evaluation");
  c_ev->add_option("--scores", ev.scores, "Per-feature scores CSV from detect")->required();
  c_ev->add_option("--features", ev.features, "Features file supplying pixel rects");
  c_ev->add_option("--masks", ev.masks, "Ground-truth masks (SAMSK001)");
  c_ev->add_option("--labels", ev.labels, "Ground-truth frame labels CSV");
  c_ev->add_option("--frame-span", ev.frame_span, "Frames covered by each feature");
  c_ev->add_option("--overlap", ev.overlap, "Pixel-level coverage fraction");
  c_ev->add_option("--out", ev.out, "Frame-level report JSON")->required();
  c_ev->add_option("--pixel-out", ev.pixel_out, "Pixel-level report JSON");
  c_ev->add_option("--roc-csv", ev.roc_csv, "Frame-level ROC CSV");
  c_ev->add_option("--pixel-roc-csv", ev.pixel_roc_csv, "Pixel-level ROC CSV");

  BenchCodesArgs bc;
  auto* c_bc = app.add_subcommand("bench-codes", "Time, error and density per solver");
  c_bc->add_option("--features", bc.features, "Features (SAFEA001)")->required();
  c_bc->add_option("--dict", bc.dict, "Dictionary (SADICT01)")->required();
  c_bc->add_option("--solvers", bc.solvers, "Comma-separated solvers");
  c_bc->add_option("--out", bc.out, "Output CSV")->required();
  bc.solver.add(c_bc);

  BenchDetectArgs bd;
  auto* c_bd = app.add_subcommand("bench-detect", "Frame/pixel metrics per solver and detector");
  c_bd->add_option("--features", bd.features, "Features (SAFEA001)")->required();
  c_bd->add_option("--dict", bd.dict, "Dictionary (SADICT01)")->required();
  c_bd->add_option("--codes", bd.codes, "name=path codes file, repeatable")->required();
  c_bd->add_option("--detectors", bd.detectors, "Comma-separated detectors");
  c_bd->add_option("--masks", bd.masks, "Ground-truth masks (SAMSK001)");
  c_bd->add_option("--labels", bd.labels, "Ground-truth frame labels CSV");
  c_bd->add_option("--frame-span", bd.frame_span, "Frames covered by each feature");
  c_bd->add_option("--overlap", bd.overlap, "Pixel-level coverage fraction");
  c_bd->add_flag("--are-blockwise", bd.are_blockwise, "ARE over each block, minimum residual");
  c_bd->add_option("--out", bd.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (isa.empty()) {
      // SPARSEANOM_ISA is honoured by the kernel dispatcher itself.
    } else if (isa == "scalar") {
      kernels::force_isa(kernels::Isa::scalar);
    } else if (isa == "avx2") {
      kernels::force_isa(kernels::Isa::avx2);
    } else if (isa == "neon") {
      kernels::force_isa(kernels::Isa::neon);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown --isa '" + isa + "'");
    }

    if (c_sr->parsed()) run_synth_recovery(sr, common);
    if (c_sv->parsed()) run_synth_video(sv, common);
    if (c_ex->parsed()) run_extract(ex, common);
    if (c_tr->parsed()) run_train(tr, common);
    if (c_en->parsed()) run_encode(en, common);
    if (c_de->parsed()) run_detect(de, common);
    if (c_ev->parsed()) run_evaluate(ev, common);
    if (c_bc->parsed()) run_bench_codes(bc, common);
    if (c_bd->parsed()) run_bench_detect(bd, common);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
