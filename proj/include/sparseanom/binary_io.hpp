#pragma once

// Little-endian binary encoding shared by the on-disk formats.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparseanom::io {

class Writer {
 public:
  void magic(std::string_view tag);
  void u32(std::uint32_t v);
  void f32(float v);
  void f64(double v);

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::size_t size() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Cursor over a byte buffer; every read past the end throws Error(malformed).
class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, std::string source)
      : data_(data), source_(std::move(source)) {}

  // Throws Error(bad_magic) when the next 8 bytes differ from tag.
  void expect_magic(std::string_view tag);
  std::uint32_t u32();
  float f32();
  double f64();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string& source() const { return source_; }
  // Throws Error(malformed) if fewer than n bytes remain.
  void require(std::size_t n, const char* what) const;

 private:
  std::span<const std::uint8_t> data_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace sparseanom::io
