#include "sparseanom/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"
#include "sparseanom/least_squares.hpp"

namespace sparseanom {
namespace {

void check_input(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg) {
  if (y.size() != dict.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "signal length " + std::to_string(y.size()) + " != dictionary dimension " +
                    std::to_string(dict.dim()));
  }
  if (!(cfg.residual_tol >= 0.0)) throw Error(ErrorCode::invalid_argument, "residual_tol must be >= 0");
}

double norm(const Vector& v) { return std::sqrt(kernels::squared_norm(as_span(v))); }

// r = y - sum_k coef[k] * d_{support[k]}
Vector residual_of(const Dictionary& dict, std::span<const double> y,
                   const std::vector<std::uint32_t>& support, const Vector& coef) {
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    kernels::axpy(-coef[static_cast<Eigen::Index>(k)], dict.atom(support[k]), as_span(r));
  }
  return r;
}

void finish(const Dictionary& dict, std::span<const double> y, SparseCode& code) {
  std::erase_if(code.support, [&](std::uint32_t j) { return code.coeffs[j] == 0.0; });
  code.residual_norm = residual_norm(dict, y, code.coeffs);
}

// Shared tail of OMP and StOMP: scatter least-squares coefficients.
void scatter(const std::vector<std::uint32_t>& support, const Vector& coef, Vector& coeffs) {
  coeffs.setZero();
  for (std::size_t k = 0; k < support.size(); ++k) coeffs[support[k]] = coef[static_cast<Eigen::Index>(k)];
}

}  // namespace

std::size_t argmax_abs(std::span<const double> v, const std::vector<bool>* skip) {
  std::size_t best = v.size();
  double best_val = -1.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (skip && (*skip)[j]) continue;
    const double a = std::abs(v[j]);
    if (a > best_val) {
      best_val = a;
      best = j;
    }
  }
  return best;
}

SparseCode mp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg) {
  check_input(dict, y, cfg);
  const std::size_t m = dict.size();
  const std::size_t max_iter = cfg.max_iter ? cfg.max_iter : m;

  SparseCode code;
  code.coeffs = Vector::Zero(static_cast<Eigen::Index>(m));
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  Vector corr(static_cast<Eigen::Index>(m));
  std::vector<bool> seen(m, false);
  double rn = norm(r);
  code.residual_history.push_back(rn);

  while (code.iterations < max_iter && rn > cfg.residual_tol) {
    kernels::correlate(dict.atoms().data(), dict.dim(), m, as_span(r), as_span(corr));
    const std::size_t j = argmax_abs(as_span(corr));
    const double c = corr[static_cast<Eigen::Index>(j)];
    if (c == 0.0) break;
    code.coeffs[static_cast<Eigen::Index>(j)] += c;
    kernels::axpy(-c, dict.atom(j), as_span(r));
    if (!seen[j]) {
      seen[j] = true;
      code.support.push_back(static_cast<std::uint32_t>(j));
    }
    ++code.iterations;
    rn = norm(r);
    code.residual_history.push_back(rn);
  }
  finish(dict, y, code);
  return code;
}

SparseCode omp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg) {
  check_input(dict, y, cfg);
  const std::size_t m = dict.size();
  const std::size_t p = dict.dim();
  const std::size_t max_iter = cfg.max_iter ? cfg.max_iter : std::min(p, m);
  if (max_iter > p) {
    throw Error(ErrorCode::invalid_argument,
                "OMP max_iter " + std::to_string(max_iter) + " exceeds dimension " + std::to_string(p));
  }

  SparseCode code;
  code.coeffs = Vector::Zero(static_cast<Eigen::Index>(m));
  IncrementalQr qr(p, cfg.rank_tol);
  std::vector<bool> selected(m, false);
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  Vector corr(static_cast<Eigen::Index>(m));
  Vector coef;
  double rn = norm(r);
  code.residual_history.push_back(rn);

  while (code.iterations < max_iter && rn > cfg.residual_tol) {
    kernels::correlate(dict.atoms().data(), p, m, as_span(r), as_span(corr));
    const std::size_t j = argmax_abs(as_span(corr), &selected);
    if (j == m || corr[static_cast<Eigen::Index>(j)] == 0.0) break;
    if (!qr.add(dict.atom(j))) {
      code.flag = CodeFlag::rank_deficient;
      break;
    }
    selected[j] = true;
    code.support.push_back(static_cast<std::uint32_t>(j));
    coef = qr.solve(y);
    r = residual_of(dict, y, code.support, coef);
    ++code.iterations;
    rn = norm(r);
    code.residual_history.push_back(rn);
  }
  if (!code.support.empty()) scatter(code.support, coef, code.coeffs);
  finish(dict, y, code);
  return code;
}

SparseCode stomp_encode(const Dictionary& dict, std::span<const double> y, const PursuitConfig& cfg) {
  check_input(dict, y, cfg);
  if (!(cfg.stomp_threshold > 0.0)) throw Error(ErrorCode::invalid_argument, "StOMP threshold must be > 0");
  if (cfg.stomp_stages < 1) throw Error(ErrorCode::invalid_argument, "StOMP needs at least one stage");
  const std::size_t m = dict.size();
  const std::size_t p = dict.dim();
  const double sqrt_p = std::sqrt(static_cast<double>(p));

  SparseCode code;
  code.coeffs = Vector::Zero(static_cast<Eigen::Index>(m));
  IncrementalQr qr(p, cfg.rank_tol);
  std::vector<bool> selected(m, false);
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  Vector corr(static_cast<Eigen::Index>(m));
  Vector coef;
  double rn = norm(r);
  code.residual_history.push_back(rn);
  std::vector<std::uint32_t> candidates;

  for (std::size_t stage = 0; stage < cfg.stomp_stages && rn > cfg.residual_tol; ++stage) {
    kernels::correlate(dict.atoms().data(), p, m, as_span(r), as_span(corr));
    const double cut = cfg.stomp_threshold * rn / sqrt_p;
    candidates.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (!selected[j] && std::abs(corr[static_cast<Eigen::Index>(j)]) > cut) {
        candidates.push_back(static_cast<std::uint32_t>(j));
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::abs(corr[a]) > std::abs(corr[b]);
    });
    std::size_t added = 0;
    for (std::uint32_t j : candidates) {
      if (qr.add(dict.atom(j))) {
        selected[j] = true;
        code.support.push_back(j);
        ++added;
      } else {
        code.flag = CodeFlag::rank_deficient;
      }
    }
    if (added == 0) {
      if (stage == 0 && candidates.empty()) code.flag = CodeFlag::no_atoms_above_threshold;
      break;
    }
    coef = qr.solve(y);
    r = residual_of(dict, y, code.support, coef);
    ++code.iterations;
    rn = norm(r);
    code.residual_history.push_back(rn);
  }
  if (!code.support.empty()) scatter(code.support, coef, code.coeffs);
  finish(dict, y, code);
  return code;
}

}  // namespace sparseanom
