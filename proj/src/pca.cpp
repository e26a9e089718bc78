#include <cmath>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/features.hpp"

namespace sparseanom {
namespace {
constexpr std::string_view kPcaMagic = "SAPCA001";
}

double PcaModel::explained_ratio() const {
  return total_variance > 0.0 ? explained_variance.sum() / total_variance : 1.0;
}

PcaModel pca_fit(const RowMatrix& data, std::size_t k) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "PCA needs at least 2 samples");
  if (k < 1 || k > static_cast<std::size_t>(std::min(n, dim))) {
    throw Error(ErrorCode::invalid_argument,
                "PCA output dimension " + std::to_string(k) + " exceeds min(n, dim) = " +
                    std::to_string(std::min(n, dim)));
  }
  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - model.mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::numeric, "PCA eigen-decomposition failed");

  const auto kk = static_cast<Eigen::Index>(k);
  model.basis.resize(dim, kk);
  model.explained_variance.resize(kk);
  // Eigen returns ascending eigenvalues.
  for (Eigen::Index c = 0; c < kk; ++c) {
    const Eigen::Index src = dim - 1 - c;
    Vector v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < dim; ++i) {
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0.0) v = -v;
    model.basis.col(c) = v;
    model.explained_variance[c] = std::max(0.0, eig.eigenvalues()[src]);
  }
  model.total_variance = std::max(0.0, cov.trace());
  return model;
}

RowMatrix pca_apply(const PcaModel& model, const RowMatrix& data) {
  if (static_cast<std::size_t>(data.cols()) != model.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "PCA input dimension " + std::to_string(data.cols()) + " != model dimension " +
                    std::to_string(model.input_dim()));
  }
  return (data.rowwise() - model.mean.transpose()) * model.basis;
}

FeatureMatrix pca_apply(const PcaModel& model, const FeatureMatrix& features) {
  return {pca_apply(model, features.values), features.provenance};
}

RowMatrix pca_reconstruct(const PcaModel& model, const RowMatrix& projected) {
  if (static_cast<std::size_t>(projected.cols()) != model.output_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "projected dimension does not match PCA model");
  }
  RowMatrix out = projected * model.basis.transpose();
  out.rowwise() += model.mean.transpose();
  return out;
}

void save_pca(const PcaModel& model, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kPcaMagic);
  w.u32(static_cast<std::uint32_t>(model.input_dim()));
  w.u32(static_cast<std::uint32_t>(model.output_dim()));
  w.f64(model.total_variance);
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) w.f64(model.mean[i]);
  for (Eigen::Index i = 0; i < model.explained_variance.size(); ++i) w.f64(model.explained_variance[i]);
  for (Eigen::Index i = 0; i < model.basis.size(); ++i) w.f64(model.basis.data()[i]);
  io::write_file(path, w.bytes());
}

PcaModel load_pca(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::Reader r(bytes, path.string());
  r.expect_magic(kPcaMagic);
  const std::size_t dim = r.u32(), k = r.u32();
  if (k == 0 || k > dim || r.remaining() != 8 * (1 + dim + k + dim * k)) {
    throw Error(ErrorCode::dimension_mismatch, path.string() + ": payload does not match header");
  }
  PcaModel m;
  m.total_variance = r.f64();
  m.mean.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < m.mean.size(); ++i) m.mean[i] = r.f64();
  m.explained_variance.resize(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.explained_variance.size(); ++i) m.explained_variance[i] = r.f64();
  m.basis.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.basis.size(); ++i) m.basis.data()[i] = r.f64();
  return m;
}

}  // namespace sparseanom
