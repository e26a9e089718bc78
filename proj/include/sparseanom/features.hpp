#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparseanom/linalg.hpp"

namespace sparseanom {

// T x H x W grayscale frames, intensities in [0, 1], stored frame-major then
// row-major.
class VideoTensor {
 public:
  VideoTensor() = default;
  VideoTensor(std::size_t frames, std::size_t height, std::size_t width);

  std::size_t frames() const { return frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  float& at(std::size_t t, std::size_t y, std::size_t x) { return data_[(t * height_ + y) * width_ + x]; }
  float at(std::size_t t, std::size_t y, std::size_t x) const { return data_[(t * height_ + y) * width_ + x]; }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool operator==(const VideoTensor&) const = default;

 private:
  std::size_t frames_ = 0, height_ = 0, width_ = 0;
  std::vector<float> data_;
};

struct PixelRect {
  std::uint32_t x = 0, y = 0, w = 0, h = 0;
  bool operator==(const PixelRect&) const = default;
};

struct Provenance {
  std::uint32_t frame_index = 0;  // first frame of the cube
  std::uint32_t patch_row = 0;
  std::uint32_t patch_col = 0;
  PixelRect rect;
  bool operator==(const Provenance&) const = default;
};

// n feature vectors (rows) with per-row provenance.
struct FeatureMatrix {
  RowMatrix values;
  std::vector<Provenance> provenance;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

struct CubeGeometry {
  std::size_t patch_w = 23;
  std::size_t patch_h = 15;
  std::size_t depth = 5;
  // 0 = equal to the patch size (non-overlapping tiling)
  std::size_t stride_x = 0, stride_y = 0, stride_t = 0;

  std::size_t sx() const { return stride_x ? stride_x : patch_w; }
  std::size_t sy() const { return stride_y ? stride_y : patch_h; }
  std::size_t st() const { return stride_t ? stride_t : depth; }
};

// A depth x patch_h x patch_w block of voxels, frame-major then row-major.
struct Cube {
  std::vector<double> voxels;
  Provenance provenance;
};

// Grid counts (columns, rows, slabs) for a video of the given size.
struct CubeGrid {
  std::size_t cols = 0, rows = 0, slabs = 0;
  std::size_t count() const { return cols * rows * slabs; }
};
CubeGrid cube_grid(std::size_t frames, std::size_t height, std::size_t width, const CubeGeometry& g);

// Tiles the video into cubes; partial border cubes are dropped. Ordered by
// slab, then patch row, then patch column.
std::vector<Cube> extract_cubes(const VideoTensor& video, const CubeGeometry& geometry = {});

struct DescriptorConfig {
  std::size_t cells_x = 8, cells_y = 7, cells_t = 3;
  std::size_t raw_dim = 500;
};

// Per-cell mean |Gx|, |Gy|, |Gt| of central-difference gradients (one-sided
// at the cube faces), cells in (t, y, x) order, channels interleaved,
// truncated to raw_dim.
Vector gradient_descriptor(std::span<const double> cube, const CubeGeometry& geometry,
                           const DescriptorConfig& cfg = {});

// Output length of gradient_descriptor for a geometry.
std::size_t descriptor_dim(const CubeGeometry& geometry, const DescriptorConfig& cfg = {});

// extract_cubes + gradient_descriptor over the whole video.
FeatureMatrix extract_features(const VideoTensor& video, const CubeGeometry& geometry = {},
                               const DescriptorConfig& cfg = {}, std::size_t threads = 0);

struct PcaModel {
  Vector mean;
  Matrix basis;  // raw_dim x k, orthonormal columns
  Vector explained_variance;  // top-k covariance eigenvalues, non-increasing
  double total_variance = 0.0;

  std::size_t input_dim() const { return static_cast<std::size_t>(basis.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(basis.cols()); }
  double explained_ratio() const;
};

// Eigen-decomposition of the 1/n covariance. Each basis vector's
// largest-magnitude entry is made positive.
PcaModel pca_fit(const RowMatrix& data, std::size_t k = 100);
RowMatrix pca_apply(const PcaModel& model, const RowMatrix& data);
FeatureMatrix pca_apply(const PcaModel& model, const FeatureMatrix& features);
// Maps projected rows back to input space.
RowMatrix pca_reconstruct(const PcaModel& model, const RowMatrix& projected);

// "SAVID001": u32 T, H, W, then T*H*W float32.
void save_video(const VideoTensor& video, const std::filesystem::path& path);
VideoTensor load_video(const std::filesystem::path& path);
// Directory of binary (P5) or ASCII (P2) PGM frames, sorted by file name,
// scaled to [0, 1] by maxval.
VideoTensor load_pgm_directory(const std::filesystem::path& dir);
// Picks the loader from the path: directory -> PGM sequence, file -> SAVID001.
VideoTensor load_video_any(const std::filesystem::path& path);

// "SAFEA001": u32 n, u32 dim, n*dim float64 row-major, then per row
// 7 x u32 (frame_index, patch_row, patch_col, rect x, y, w, h).
void save_features(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix load_features(const std::filesystem::path& path);

// "SAPCA001": u32 input_dim, u32 k, f64 total_variance, mean, explained
// variance, then basis column-major.
void save_pca(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace sparseanom
