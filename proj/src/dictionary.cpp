#include "sparseanom/dictionary.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/rng.hpp"

namespace sparseanom {
namespace {
constexpr std::string_view kMagic = "SADICT01";
}

Dictionary::Dictionary(Matrix atoms, std::vector<Block> blocks)
    : atoms_(std::move(atoms)), blocks_(std::move(blocks)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) {
    throw Error(ErrorCode::invalid_argument, "dictionary must have p >= 1 and m >= 1");
  }
  for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
    const double norm = atoms_.col(j).norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      throw Error(ErrorCode::invalid_argument,
                  "atom " + std::to_string(j) + " is not unit norm (" + std::to_string(norm) + ")");
    }
  }
  if (!blocks_.empty()) validate_blocks(blocks_, size());
}

Dictionary Dictionary::with_blocks(std::vector<Block> blocks) const {
  return Dictionary(atoms_, std::move(blocks));
}

bool Dictionary::operator==(const Dictionary& other) const {
  if (atoms_.rows() != other.atoms_.rows() || atoms_.cols() != other.atoms_.cols()) return false;
  if (blocks_ != other.blocks_) return false;
  // Bitwise comparison so that -0.0 / NaN payloads are not glossed over.
  return std::memcmp(atoms_.data(), other.atoms_.data(),
                     sizeof(double) * static_cast<std::size_t>(atoms_.size())) == 0;
}

std::vector<Block> equal_blocks(std::size_t m, std::size_t count) {
  if (count == 0 || count > m) {
    throw Error(ErrorCode::invalid_argument,
                "block count must be in [1, m]; got " + std::to_string(count));
  }
  std::vector<Block> blocks;
  blocks.reserve(count);
  const std::size_t base = m / count;
  const std::size_t extra = m % count;
  std::uint32_t start = 0;
  for (std::size_t b = 0; b < count; ++b) {
    const auto len = static_cast<std::uint32_t>(base + (b < extra ? 1 : 0));
    blocks.push_back({start, len});
    start += len;
  }
  return blocks;
}

void validate_blocks(const std::vector<Block>& blocks, std::size_t m) {
  std::vector<bool> seen(m, false);
  for (const Block& b : blocks) {
    if (b.length == 0 || static_cast<std::size_t>(b.start) + b.length > m) {
      throw Error(ErrorCode::invalid_argument, "block out of range");
    }
    for (std::uint32_t j = b.start; j < b.start + b.length; ++j) {
      if (seen[j]) throw Error(ErrorCode::invalid_argument, "blocks overlap at atom " + std::to_string(j));
      seen[j] = true;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!seen[j]) throw Error(ErrorCode::invalid_argument, "blocks do not cover atom " + std::to_string(j));
  }
}

NormalizeResult normalize_atoms(Matrix atoms, std::uint64_t seed) {
  NormalizeResult out;
  Rng rng(seed);
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      // Columns already unit up to rounding are left bit-identical, so the
      // operation is idempotent.
      if (std::abs(norm - 1.0) > 1e-14) atoms.col(j) /= norm;
      continue;
    }
    double fresh = 0.0;
    do {
      for (Eigen::Index i = 0; i < atoms.rows(); ++i) atoms(i, j) = rng.normal();
      fresh = atoms.col(j).norm();
    } while (fresh == 0.0);
    atoms.col(j) /= fresh;
    out.replaced.push_back(static_cast<std::size_t>(j));
  }
  out.atoms = std::move(atoms);
  return out;
}

std::vector<std::uint8_t> encode_dictionary(const Dictionary& dict) {
  io::Writer w;
  w.magic(kMagic);
  w.u32(static_cast<std::uint32_t>(dict.dim()));
  w.u32(static_cast<std::uint32_t>(dict.size()));
  w.u32(static_cast<std::uint32_t>(dict.blocks().size()));
  for (const Block& b : dict.blocks()) {
    w.u32(b.start);
    w.u32(b.length);
  }
  const Matrix& a = dict.atoms();
  for (Eigen::Index k = 0; k < a.size(); ++k) w.f64(a.data()[k]);
  const auto& bytes = w.bytes();
  const std::uint32_t crc = io::crc32({bytes.data() + kMagic.size(), bytes.size() - kMagic.size()});
  w.u32(crc);
  return w.bytes();
}

Dictionary decode_dictionary(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::Reader r(bytes, source);
  r.expect_magic(kMagic);
  const std::uint32_t p = r.u32();
  const std::uint32_t m = r.u32();
  const std::uint32_t nblocks = r.u32();
  if (p == 0 || m == 0 || nblocks > m) {
    throw Error(ErrorCode::malformed, source + ": malformed header");
  }
  r.require(static_cast<std::size_t>(nblocks) * 8, "blocks");
  std::vector<Block> blocks(nblocks);
  for (auto& b : blocks) {
    b.start = r.u32();
    b.length = r.u32();
  }
  const std::size_t payload = static_cast<std::size_t>(p) * m * 8;
  if (r.remaining() != payload + 4) {
    throw Error(ErrorCode::dimension_mismatch,
                source + ": file size does not match " + std::to_string(p) + "x" + std::to_string(m));
  }
  const std::size_t payload_start = kMagic.size();
  const std::size_t payload_end = bytes.size() - 4;
  Matrix atoms(p, m);
  for (Eigen::Index k = 0; k < atoms.size(); ++k) atoms.data()[k] = r.f64();
  const std::uint32_t stored = r.u32();
  if (io::crc32(bytes.subspan(payload_start, payload_end - payload_start)) != stored) {
    throw Error(ErrorCode::checksum, source + ": checksum failure");
  }
  try {
    return Dictionary(std::move(atoms), std::move(blocks));
  } catch (const Error& e) {
    throw Error(ErrorCode::malformed, source + ": " + e.what());
  }
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  io::write_file(path, encode_dictionary(dict));
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_dictionary(bytes, path.string());
}

std::string dictionary_to_csv(const Dictionary& dict) {
  std::ostringstream out;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    const auto atom = dict.atom(j);
    for (std::size_t i = 0; i < atom.size(); ++i) {
      if (i) out << ',';
      out << io::format_double(atom[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sparseanom
