#pragma once

#include <cstddef>
#include <span>

#include "sparseanom/dictionary.hpp"
#include "sparseanom/sparse_code.hpp"

namespace sparseanom {

struct PursuitConfig {
  std::size_t max_iter = 0;  // 0 = coder default (MP: m, OMP: min(p, m))
  double residual_tol = 1e-6;
  double stomp_threshold = 2.5;
  std::size_t stomp_stages = 10;
  double rank_tol = 1e-10;
};

// Matching Pursuit: one atom per step, atoms may be reselected.
SparseCode mp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg);

// Orthogonal Matching Pursuit: least-squares refit on the support every step.
SparseCode omp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg);

// Stagewise OMP: per stage, every atom with |<d_j, r>| > t * ||r|| / sqrt(p).
SparseCode stomp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg);

// Index of max |v_j|, lowest index on ties. skip (optional) masks indices out.
std::size_t argmax_abs(std::span<const double> v, const std::vector<bool>* skip = nullptr);

}  // namespace sparseanom
