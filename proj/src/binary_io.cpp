#include "sparseanom/binary_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "sparseanom/error.hpp"

namespace sparseanom {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::malformed: return "malformed file";
    case ErrorCode::checksum: return "checksum failure";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::numeric: return "numeric failure";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::missing_requirement: return "missing requirement";
  }
  return "error";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return 2;
    case ErrorCode::bad_magic:
    case ErrorCode::malformed:
    case ErrorCode::checksum: return 3;
    case ErrorCode::numeric: return 4;
    case ErrorCode::infeasible: return 5;
    case ErrorCode::dimension_mismatch: return 6;
    case ErrorCode::missing_requirement: return 7;
    case ErrorCode::io: return 8;
  }
  return 1;
}

namespace io {

void Writer::magic(std::string_view tag) {
  for (char c : tag) buf_.push_back(static_cast<std::uint8_t>(c));
}

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void Writer::f64(double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void Reader::require(std::size_t n, const char* what) const {
  if (remaining() < n) {
    throw Error(ErrorCode::malformed, source_ + ": truncated while reading " + what);
  }
}

void Reader::expect_magic(std::string_view tag) {
  if (remaining() < tag.size() ||
      std::string_view(reinterpret_cast<const char*>(data_.data() + pos_), tag.size()) != tag) {
    throw Error(ErrorCode::bad_magic, source_ + ": bad magic (expected " + std::string(tag) + ")");
  }
  pos_ += tag.size();
}

std::uint32_t Reader::u32() {
  require(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

float Reader::f32() { return std::bit_cast<float>(u32()); }

double Reader::f64() {
  require(8, "f64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return std::bit_cast<double>(v);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large payloads.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace io
}  // namespace sparseanom
