#include "sparseanom/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/parallel.hpp"

namespace sparseanom {
namespace {

constexpr std::string_view kVideoMagic = "SAVID001";
constexpr std::string_view kFeatureMagic = "SAFEA001";

// Cell c of C along an axis of n voxels: [c*n/C, (c+1)*n/C).
std::size_t cell_begin(std::size_t c, std::size_t n, std::size_t cells) { return c * n / cells; }

// Derivative along one axis: central differences inside, one-sided at the ends.
inline double diff(const double* base, std::size_t i, std::size_t n, std::size_t step) {
  if (n < 2) return 0.0;
  if (i == 0) return base[step] - base[0];
  if (i == n - 1) return base[0] - base[-static_cast<std::ptrdiff_t>(step)];
  return 0.5 * (base[step] - base[-static_cast<std::ptrdiff_t>(step)]);
}

}  // namespace

VideoTensor::VideoTensor(std::size_t frames, std::size_t height, std::size_t width)
    : frames_(frames), height_(height), width_(width), data_(frames * height * width, 0.0f) {}

CubeGrid cube_grid(std::size_t frames, std::size_t height, std::size_t width, const CubeGeometry& g) {
  auto count = [](std::size_t extent, std::size_t size, std::size_t stride) -> std::size_t {
    return extent < size ? 0 : (extent - size) / stride + 1;
  };
  return {count(width, g.patch_w, g.sx()), count(height, g.patch_h, g.sy()), count(frames, g.depth, g.st())};
}

std::vector<Cube> extract_cubes(const VideoTensor& video, const CubeGeometry& g) {
  if (g.patch_w == 0 || g.patch_h == 0 || g.depth == 0) {
    throw Error(ErrorCode::invalid_argument, "cube dimensions must be positive");
  }
  if (video.frames() < g.depth) {
    throw Error(ErrorCode::invalid_argument,
                "video has " + std::to_string(video.frames()) + " frames, shorter than cube depth " +
                    std::to_string(g.depth));
  }
  if (video.height() < g.patch_h || video.width() < g.patch_w) {
    throw Error(ErrorCode::invalid_argument, "frame smaller than one patch");
  }
  const CubeGrid grid = cube_grid(video.frames(), video.height(), video.width(), g);
  std::vector<Cube> cubes;
  cubes.reserve(grid.count());
  for (std::size_t s = 0; s < grid.slabs; ++s) {
    for (std::size_t r = 0; r < grid.rows; ++r) {
      for (std::size_t c = 0; c < grid.cols; ++c) {
        Cube cube;
        const std::size_t t0 = s * g.st(), y0 = r * g.sy(), x0 = c * g.sx();
        cube.voxels.reserve(g.depth * g.patch_h * g.patch_w);
        for (std::size_t t = 0; t < g.depth; ++t)
          for (std::size_t y = 0; y < g.patch_h; ++y)
            for (std::size_t x = 0; x < g.patch_w; ++x) cube.voxels.push_back(video.at(t0 + t, y0 + y, x0 + x));
        cube.provenance = {static_cast<std::uint32_t>(t0), static_cast<std::uint32_t>(r),
                           static_cast<std::uint32_t>(c),
                           {static_cast<std::uint32_t>(x0), static_cast<std::uint32_t>(y0),
                            static_cast<std::uint32_t>(g.patch_w), static_cast<std::uint32_t>(g.patch_h)}};
        cubes.push_back(std::move(cube));
      }
    }
  }
  return cubes;
}

std::size_t descriptor_dim(const CubeGeometry& g, const DescriptorConfig& cfg) {
  const std::size_t cells = std::min(cfg.cells_x, g.patch_w) * std::min(cfg.cells_y, g.patch_h) *
                            std::min(cfg.cells_t, g.depth);
  return std::min(cfg.raw_dim, 3 * cells);
}

Vector gradient_descriptor(std::span<const double> cube, const CubeGeometry& g, const DescriptorConfig& cfg) {
  const std::size_t nx = g.patch_w, ny = g.patch_h, nt = g.depth;
  if (cube.size() != nx * ny * nt) {
    throw Error(ErrorCode::dimension_mismatch,
                "cube has " + std::to_string(cube.size()) + " voxels, expected " + std::to_string(nx * ny * nt));
  }
  const std::size_t cx = std::min(cfg.cells_x, nx), cy = std::min(cfg.cells_y, ny), ct = std::min(cfg.cells_t, nt);
  const std::size_t full = 3 * cx * cy * ct;
  std::vector<double> sums(full, 0.0);
  std::vector<std::size_t> counts(cx * cy * ct, 0);

  // Voxel -> cell lookup per axis.
  auto lookup = [](std::size_t n, std::size_t cells) {
    std::vector<std::size_t> map(n);
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t i = cell_begin(c, n, cells); i < cell_begin(c + 1, n, cells); ++i) map[i] = c;
    return map;
  };
  const auto mx = lookup(nx, cx), my = lookup(ny, cy), mt = lookup(nt, ct);

  const std::size_t sy = nx, st = nx * ny;
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const double* v = cube.data() + t * st + y * sy + x;
        const std::size_t cell = (mt[t] * cy + my[y]) * cx + mx[x];
        sums[3 * cell] += std::abs(diff(v, x, nx, 1));
        sums[3 * cell + 1] += std::abs(diff(v, y, ny, sy));
        sums[3 * cell + 2] += std::abs(diff(v, t, nt, st));
        ++counts[cell];
      }
    }
  }
  const std::size_t dim = std::min(cfg.raw_dim, full);
  Vector out(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) out[static_cast<Eigen::Index>(k)] = sums[k] / static_cast<double>(counts[k / 3]);
  return out;
}

FeatureMatrix extract_features(const VideoTensor& video, const CubeGeometry& g, const DescriptorConfig& cfg,
                               std::size_t threads) {
  const std::vector<Cube> cubes = extract_cubes(video, g);
  FeatureMatrix out;
  out.values.resize(static_cast<Eigen::Index>(cubes.size()), static_cast<Eigen::Index>(descriptor_dim(g, cfg)));
  out.provenance.resize(cubes.size());
  parallel_for(cubes.size(), threads, [&](std::size_t i) {
    out.values.row(static_cast<Eigen::Index>(i)) = gradient_descriptor(cubes[i].voxels, g, cfg).transpose();
    out.provenance[i] = cubes[i].provenance;
  });
  return out;
}

void save_video(const VideoTensor& video, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kVideoMagic);
  w.u32(static_cast<std::uint32_t>(video.frames()));
  w.u32(static_cast<std::uint32_t>(video.height()));
  w.u32(static_cast<std::uint32_t>(video.width()));
  for (float v : video.data()) w.f32(v);
  io::write_file(path, w.bytes());
}

VideoTensor load_video(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::Reader r(bytes, path.string());
  r.expect_magic(kVideoMagic);
  const std::size_t t = r.u32(), h = r.u32(), w = r.u32();
  if (r.remaining() != t * h * w * 4) {
    throw Error(ErrorCode::dimension_mismatch, path.string() + ": payload does not match T*H*W");
  }
  VideoTensor video(t, h, w);
  for (float& v : video.data()) v = r.f32();
  return video;
}

namespace {

struct PgmImage {
  std::size_t width = 0, height = 0;
  std::vector<float> pixels;
};

PgmImage read_pgm(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto token = [&] {
    skip_space();
    std::string s;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') s.push_back(static_cast<char>(bytes[pos++]));
    if (s.empty()) throw Error(ErrorCode::malformed, path.string() + ": truncated PGM header");
    return s;
  };
  auto number = [&] {
    const std::string s = token();
    if (!std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw Error(ErrorCode::malformed, path.string() + ": bad PGM header value '" + s + "'");
    }
    return static_cast<std::size_t>(std::stoul(s));
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P2") throw Error(ErrorCode::bad_magic, path.string() + ": not a PGM file");
  PgmImage img;
  img.width = number();
  img.height = number();
  const std::size_t maxval = number();
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::malformed, path.string() + ": bad maxval");
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + count * bpp) throw Error(ErrorCode::malformed, path.string() + ": truncated PGM data");
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t raw = bpp == 1 ? bytes[pos + i] : (static_cast<std::size_t>(bytes[pos + 2 * i]) << 8) | bytes[pos + 2 * i + 1];
      img.pixels[i] = static_cast<float>(static_cast<double>(raw) / static_cast<double>(maxval));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      img.pixels[i] = static_cast<float>(static_cast<double>(number()) / static_cast<double>(maxval));
    }
  }
  return img;
}

}  // namespace

VideoTensor load_pgm_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorCode::io, dir.string() + ": no .pgm frames");
  std::sort(files.begin(), files.end());
  std::vector<PgmImage> frames;
  for (const auto& f : files) frames.push_back(read_pgm(f));
  const std::size_t h = frames[0].height, w = frames[0].width;
  VideoTensor video(frames.size(), h, w);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].height != h || frames[t].width != w) {
      throw Error(ErrorCode::dimension_mismatch, files[t].string() + ": frame size differs from first frame");
    }
    std::copy(frames[t].pixels.begin(), frames[t].pixels.end(), video.data().begin() + static_cast<std::ptrdiff_t>(t * h * w));
  }
  return video;
}

VideoTensor load_video_any(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return load_pgm_directory(path);
  return load_video(path);
}

void save_features(const FeatureMatrix& f, const std::filesystem::path& path) {
  if (f.provenance.size() != f.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "provenance count differs from feature rows");
  }
  io::Writer w;
  w.magic(kFeatureMagic);
  w.u32(static_cast<std::uint32_t>(f.rows()));
  w.u32(static_cast<std::uint32_t>(f.dim()));
  for (Eigen::Index k = 0; k < f.values.size(); ++k) w.f64(f.values.data()[k]);
  for (const Provenance& p : f.provenance) {
    for (std::uint32_t v : {p.frame_index, p.patch_row, p.patch_col, p.rect.x, p.rect.y, p.rect.w, p.rect.h}) w.u32(v);
  }
  io::write_file(path, w.bytes());
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::Reader r(bytes, path.string());
  r.expect_magic(kFeatureMagic);
  const std::size_t n = r.u32(), dim = r.u32();
  if (r.remaining() != n * dim * 8 + n * 7 * 4) {
    throw Error(ErrorCode::dimension_mismatch, path.string() + ": payload does not match n x dim");
  }
  FeatureMatrix f;
  f.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < f.values.size(); ++k) f.values.data()[k] = r.f64();
  f.provenance.resize(n);
  for (Provenance& p : f.provenance) {
    p.frame_index = r.u32();
    p.patch_row = r.u32();
    p.patch_col = r.u32();
    p.rect = {r.u32(), r.u32(), r.u32(), r.u32()};
  }
  return f;
}

}  // namespace sparseanom
