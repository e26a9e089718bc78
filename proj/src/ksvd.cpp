#include <algorithm>
#include <cmath>

#include "sparseanom/dictionary.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"
#include "sparseanom/parallel.hpp"
#include "sparseanom/pursuit.hpp"
#include "sparseanom/rng.hpp"

namespace sparseanom {
namespace {

struct Entry {
  std::uint32_t atom;
  double value;
};
using SparseRow = std::vector<Entry>;

void random_unit(Rng& rng, Eigen::Ref<Vector> out) {
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
    n = out.norm();
  } while (n == 0.0);
  out /= n;
}

// Flips u so its first non-zero entry is positive; returns the applied sign.
double fix_sign(Eigen::Ref<Vector> u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0) {
      if (u[i] < 0.0) {
        u = -u;
        return -1.0;
      }
      return 1.0;
    }
  }
  return 1.0;
}

Vector row_residual(const RowMatrix& y, Eigen::Index i, const Matrix& d, const SparseRow& code) {
  Vector r = y.row(i).transpose();
  for (const Entry& e : code) {
    kernels::axpy(-e.value, col_span(d, e.atom), as_span(r));
  }
  return r;
}

}  // namespace

TrainResult ksvd_train(const RowMatrix& features, const TrainConfig& cfg) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "no training data");
  if (p == 0) throw Error(ErrorCode::dimension_mismatch, "training features have dimension 0");
  if (cfg.atom_count < 1) throw Error(ErrorCode::invalid_argument, "atom_count must be >= 1");
  if (cfg.sweeps < 1) throw Error(ErrorCode::invalid_argument, "sweeps must be >= 1");
  if (cfg.sparsity < 1 || cfg.sparsity >= static_cast<std::size_t>(p)) {
    throw Error(ErrorCode::invalid_argument,
                "sparsity target must satisfy 1 <= T < p (T=" + std::to_string(cfg.sparsity) +
                    ", p=" + std::to_string(p) + ")");
  }
  const auto k_atoms = static_cast<Eigen::Index>(cfg.atom_count);

  Rng rng(cfg.seed);
  Matrix d(p, k_atoms);
  {
    const auto picks = rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                      std::min<std::size_t>(n, cfg.atom_count));
    Eigen::Index j = 0;
    for (std::size_t row : picks) {
      d.col(j) = features.row(static_cast<Eigen::Index>(row)).transpose();
      const double norm = d.col(j).norm();
      if (norm > 0.0) {
        d.col(j) /= norm;
      } else {
        random_unit(rng, d.col(j));
      }
      ++j;
    }
    for (; j < k_atoms; ++j) random_unit(rng, d.col(j));
  }

  std::vector<SparseRow> codes(static_cast<std::size_t>(n));
  std::vector<SparseRow> fresh(static_cast<std::size_t>(n));
  std::vector<double> fresh_err(static_cast<std::size_t>(n));
  RowMatrix residual(n, p);
  std::vector<double> resid_sq(static_cast<std::size_t>(n), 0.0);

  PursuitConfig omp_cfg;
  omp_cfg.max_iter = cfg.sparsity;
  omp_cfg.residual_tol = 1e-12;

  TrainResult result{Dictionary(Matrix::Identity(1, 1)), {}, 0.0, 0};

  for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
    const Dictionary current(d);

    // Sparse coding stage. A row keeps its previous code when the new OMP
    // code reconstructs it worse, so the objective cannot rise here.
    parallel_for(static_cast<std::size_t>(n), cfg.threads, [&](std::size_t i) {
      const auto row = row_span(features, static_cast<Eigen::Index>(i));
      const SparseCode c = omp_encode(current, row, omp_cfg);
      SparseRow out;
      for (std::uint32_t j : c.support) out.push_back({j, c.coeffs[j]});
      fresh[i] = std::move(out);
      fresh_err[i] = c.residual_norm * c.residual_norm;
    });
    double coding_error = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (sweep == 0 || fresh_err[ui] < resid_sq[ui]) codes[ui] = std::move(fresh[ui]);
      const Vector r = row_residual(features, i, d, codes[ui]);
      residual.row(i) = r.transpose();
      resid_sq[ui] = r.squaredNorm();
      coding_error += resid_sq[ui];
    }
    if (sweep == 0) result.initial_error = coding_error;

    // users[j] = (row, slot in that row's code)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> users(cfg.atom_count);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& code = codes[static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s < code.size(); ++s) {
        users[code[s].atom].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(s)});
      }
    }

    std::vector<bool> used_as_replacement(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < k_atoms; ++j) {
      const auto& who = users[static_cast<std::size_t>(j)];
      if (who.empty()) {
        // Dead atom: re-seed from the worst reconstructed training vector.
        std::size_t worst = static_cast<std::size_t>(n);
        double worst_err = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
          if (!used_as_replacement[i] && resid_sq[i] > worst_err) {
            worst_err = resid_sq[i];
            worst = i;
          }
        }
        if (worst < static_cast<std::size_t>(n)) {
          const double norm = features.row(static_cast<Eigen::Index>(worst)).norm();
          if (norm > 0.0) {
            d.col(j) = features.row(static_cast<Eigen::Index>(worst)).transpose() / norm;
            used_as_replacement[worst] = true;
            ++result.replaced_atoms;
          }
        }
        continue;
      }

      // Residual restricted to the users of atom j, with atom j added back.
      const auto cols = static_cast<Eigen::Index>(who.size());
      Matrix e(p, cols);
      for (Eigen::Index c = 0; c < cols; ++c) {
        const auto [row, slot] = who[static_cast<std::size_t>(c)];
        const double coef = codes[row][slot].value;
        e.col(c) = residual.row(row).transpose() + coef * d.col(j);
      }
      Eigen::BDCSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double sigma = svd.singularValues()[0];
      if (!(sigma > 0.0)) continue;
      Vector u = svd.matrixU().col(0);
      Vector v = svd.matrixV().col(0);
      u /= u.norm();
      v *= fix_sign(u);
      d.col(j) = u;
      for (Eigen::Index c = 0; c < cols; ++c) {
        const auto [row, slot] = who[static_cast<std::size_t>(c)];
        const double coef = sigma * v[c];
        codes[row][slot].value = coef;
        residual.row(row) = (e.col(c) - coef * u).transpose();
        resid_sq[row] = residual.row(row).squaredNorm();
      }
    }

    // Exact recomputation so the logged objective does not carry drift.
    double sweep_error = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Vector r = row_residual(features, i, d, codes[ui]);
      residual.row(i) = r.transpose();
      resid_sq[ui] = r.squaredNorm();
      sweep_error += resid_sq[ui];
    }
    result.sweep_errors.push_back(sweep_error);
  }

  result.dictionary = Dictionary(std::move(d));
  return result;
}

}  // namespace sparseanom
