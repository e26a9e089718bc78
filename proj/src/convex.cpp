#include "sparseanom/convex.hpp"

#include <algorithm>
#include <cmath>

#include "sparseanom/kernels.hpp"

namespace sparseanom {
namespace {

void check_input(const Dictionary& dict, std::span<const double> y) {
  if (y.size() != dict.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "signal length " + std::to_string(y.size()) + " != dictionary dimension " +
                    std::to_string(dict.dim()));
  }
}

double l1(const Vector& x) { return x.lpNorm<1>(); }

double linf(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

Vector correlations(const Dictionary& dict, const Vector& v) {
  Vector out(static_cast<Eigen::Index>(dict.size()));
  kernels::correlate(dict.atoms().data(), dict.dim(), dict.size(), as_span(v), as_span(out));
  return out;
}

Vector apply(const Dictionary& dict, const Vector& x) {
  Vector out(static_cast<Eigen::Index>(dict.dim()));
  kernels::combine(dict.atoms().data(), dict.dim(), dict.size(), as_span(x), as_span(out));
  return out;
}

double duality_gap(const Dictionary& dict, std::span<const double> y, const Vector& x, double lambda) {
  const Eigen::Map<const Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Vector r = yv - apply(dict, x);
  const double corr_max = linf(correlations(dict, r));
  const double scale = corr_max > lambda ? lambda / corr_max : 1.0;
  const Vector theta = scale * r;
  const double dual = 0.5 * yv.squaredNorm() - 0.5 * (yv - theta).squaredNorm();
  return 0.5 * r.squaredNorm() + lambda * l1(x) - dual;
}

}  // namespace

double default_lambda(const Dictionary& dict, std::span<const double> y) {
  check_input(dict, y);
  const Vector yv = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return 0.1 * linf(correlations(dict, yv));
}

double lasso_objective(const Dictionary& dict, std::span<const double> y, const Vector& x,
                       double lambda) {
  check_input(dict, y);
  const double rn = residual_norm(dict, y, x);
  return 0.5 * rn * rn + lambda * l1(x);
}

LassoResult lasso_solve(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg) {
  check_input(dict, y);
  const std::size_t m = dict.size();
  LassoResult out;
  out.lambda = cfg.lambda > 0.0 ? cfg.lambda : default_lambda(dict, y);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(m));
  if (!(out.lambda > 0.0)) {
    // Only reachable through the default when D^T y == 0: x = 0 is optimal.
    out.code = make_code(dict, y, std::move(x));
    return out;
  }
  const double lambda = out.lambda;
  Vector r = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));

  // One coordinate update; returns |change|.
  auto update = [&](std::size_t j) {
    const auto atom = dict.atom(j);
    const double old = x[static_cast<Eigen::Index>(j)];
    const double z = old + kernels::dot(atom, as_span(r));
    const double fresh = soft_threshold(z, lambda);
    const double delta = fresh - old;
    if (delta != 0.0) {
      kernels::axpy(-delta, atom, as_span(r));
      x[static_cast<Eigen::Index>(j)] = fresh;
    }
    return std::abs(delta);
  };

  std::vector<std::size_t> active;
  bool converged = false;
  std::size_t sweep = 0;
  for (; sweep < cfg.max_iter; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < m; ++j) max_change = std::max(max_change, update(j));
    out.objective_history.push_back(0.5 * r.squaredNorm() + lambda * l1(x));
    if (max_change <= cfg.tol) {
      converged = true;
      break;
    }
    // Polish the current non-zeros before the next full pass.
    active.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (x[static_cast<Eigen::Index>(j)] != 0.0) active.push_back(j);
    }
    for (std::size_t inner = 0; inner < cfg.max_iter; ++inner) {
      double inner_change = 0.0;
      for (std::size_t j : active) inner_change = std::max(inner_change, update(j));
      if (inner_change <= cfg.tol) break;
    }
  }
  out.duality_gap = duality_gap(dict, y, x, lambda);
  if (!converged) {
    throw ConvergenceError("lasso did not converge in " + std::to_string(cfg.max_iter) + " sweeps",
                           x, out.duality_gap, out.objective_history);
  }
  out.code = make_code(dict, y, std::move(x));
  out.code.iterations = sweep + 1;
  return out;
}

SparseCode lasso_encode(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg) {
  return lasso_solve(dict, y, cfg).code;
}

BasisPursuitSolver::BasisPursuitSolver(const Dictionary& dict) : dict_(&dict) {
  const Matrix& d = dict.atoms();
  const auto p = d.rows();
  Matrix gram = d * d.transpose();
  gram.diagonal().array() += 1.0;
  inner_.compute(gram);

  Eigen::ColPivHouseholderQR<Matrix> qr(d);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  range_basis_ = Matrix(qr.householderQ()).leftCols(rank);
  (void)p;
}

BasisPursuitResult BasisPursuitSolver::solve(std::span<const double> y, const ConvexConfig& cfg) const {
  const Dictionary& dict = *dict_;
  check_input(dict, y);
  if (!(cfg.rho > 0.0)) throw Error(ErrorCode::invalid_argument, "rho must be > 0");
  if (!(cfg.epsilon >= 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be >= 0");
  const auto p = static_cast<Eigen::Index>(dict.dim());
  const auto m = static_cast<Eigen::Index>(dict.size());
  const Vector yv = Eigen::Map<const Vector>(y.data(), p);

  BasisPursuitResult out;
  if (yv.norm() <= cfg.epsilon) {
    out.code = make_code(dict, y, Vector::Zero(m));
    return out;
  }
  const Vector off_range = yv - range_basis_ * (range_basis_.transpose() * yv);
  if (off_range.norm() > cfg.epsilon + cfg.tol) {
    throw Error(ErrorCode::infeasible,
                "infeasible: signal is " + std::to_string(off_range.norm()) +
                    " away from the dictionary span (epsilon " + std::to_string(cfg.epsilon) + ")");
  }

  const double inv_rho = 1.0 / cfg.rho;
  Vector x = Vector::Zero(m), w = Vector::Zero(m), u1 = Vector::Zero(m);
  Vector z = yv, u2 = Vector::Zero(p);
  Vector rhs(m), dx(p), w_old(m), z_old(p);

  auto project = [&](Vector v) {
    const Vector diff = v - yv;
    const double dn = diff.norm();
    if (dn <= cfg.epsilon) return v;
    return Vector(yv + (cfg.epsilon / dn) * diff);
  };

  std::size_t it = 0;
  double primal = 0.0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    // Coefficient update: (I + D^T D) x = (w - u1) + D^T (z - u2), via Woodbury.
    rhs = (w - u1) + correlations(dict, z - u2);
    x = rhs - correlations(dict, inner_.solve(apply(dict, rhs)));
    dx = apply(dict, x);

    w_old = w;
    z_old = z;
    w = x + u1;
    for (Eigen::Index j = 0; j < m; ++j) w[j] = soft_threshold(w[j], inv_rho);
    z = project(dx + u2);

    u1 += x - w;
    u2 += dx - z;

    primal = std::sqrt((x - w).squaredNorm() + (dx - z).squaredNorm());
    const double dual = cfg.rho * ((w - w_old) + correlations(dict, z - z_old)).norm();
    out.primal_residuals.push_back(primal);
    if (primal <= cfg.tol && dual <= cfg.tol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("basis pursuit did not converge in " + std::to_string(cfg.max_iter) +
                               " iterations",
                           x, primal, out.primal_residuals);
  }
  out.code = make_code(dict, y, std::move(x));
  out.code.iterations = it;
  return out;
}

BasisPursuitResult bp_solve(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg) {
  return BasisPursuitSolver(dict).solve(y, cfg);
}

SparseCode bp_encode(const Dictionary& dict, std::span<const double> y, const ConvexConfig& cfg) {
  return bp_solve(dict, y, cfg).code;
}

}  // namespace sparseanom
