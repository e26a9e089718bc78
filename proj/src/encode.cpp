#include "sparseanom/encode.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "sparseanom/error.hpp"
#include "sparseanom/parallel.hpp"

namespace sparseanom {

const char* to_string(Solver s) noexcept {
  switch (s) {
    case Solver::mp: return "mp";
    case Solver::omp: return "omp";
    case Solver::stomp: return "stomp";
    case Solver::bp: return "bp";
    case Solver::lasso: return "lasso";
  }
  return "?";
}

Solver parse_solver(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Solver v : {Solver::mp, Solver::omp, Solver::stomp, Solver::bp, Solver::lasso}) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorCode::invalid_argument, "unknown solver '" + name + "' (expected mp|omp|stomp|bp|lasso)");
}

SparseCode encode_one(Solver solver, const Dictionary& dict, std::span<const double> y, const SolverConfig& cfg) {
  switch (solver) {
    case Solver::mp: return mp_encode(dict, y, cfg.pursuit);
    case Solver::omp: return omp_encode(dict, y, cfg.pursuit);
    case Solver::stomp: return stomp_encode(dict, y, cfg.pursuit);
    case Solver::bp: return bp_encode(dict, y, cfg.convex);
    case Solver::lasso: return lasso_encode(dict, y, cfg.convex);
  }
  throw Error(ErrorCode::invalid_argument, "unknown solver");
}

std::vector<SparseCode> encode_all(Solver solver, const Dictionary& dict, const RowMatrix& features,
                                   const SolverConfig& cfg, std::size_t threads) {
  if (static_cast<std::size_t>(features.cols()) != dict.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature dimension " + std::to_string(features.cols()) + " != dictionary dimension " +
                    std::to_string(dict.dim()));
  }
  const auto n = static_cast<std::size_t>(features.rows());
  std::vector<SparseCode> codes(n);
  std::optional<BasisPursuitSolver> bp;
  if (solver == Solver::bp) bp.emplace(dict);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto y = row_span(features, static_cast<Eigen::Index>(i));
    codes[i] = bp ? bp->solve(y, cfg.convex).code : encode_one(solver, dict, y, cfg);
  });
  return codes;
}

}  // namespace sparseanom
