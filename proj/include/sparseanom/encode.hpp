#pragma once

#include <string>
#include <vector>

#include "sparseanom/convex.hpp"
#include "sparseanom/features.hpp"
#include "sparseanom/pursuit.hpp"

namespace sparseanom {

enum class Solver { mp, omp, stomp, bp, lasso };

const char* to_string(Solver s) noexcept;
// Accepts mp|omp|stomp|bp|lasso (case-insensitive); throws Error(invalid_argument).
Solver parse_solver(const std::string& name);

struct SolverConfig {
  PursuitConfig pursuit;
  ConvexConfig convex;
};

SparseCode encode_one(Solver solver, const Dictionary& dict, std::span<const double> y, const SolverConfig& cfg);

// Encodes every row of features. Rows are independent; output order matches
// input order regardless of thread count. The first failure is rethrown.
std::vector<SparseCode> encode_all(Solver solver, const Dictionary& dict, const RowMatrix& features,
                                   const SolverConfig& cfg, std::size_t threads = 0);

}  // namespace sparseanom
