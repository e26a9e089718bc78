#include "sparseanom/sparse_code.hpp"

#include <cmath>
#include <sstream>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/dictionary.hpp"
#include "sparseanom/error.hpp"
#include "sparseanom/kernels.hpp"

namespace sparseanom {
namespace {
constexpr std::string_view kMagic = "SACODE01";
}

const char* to_string(CodeFlag flag) noexcept {
  switch (flag) {
    case CodeFlag::none: return "none";
    case CodeFlag::rank_deficient: return "rank deficient";
    case CodeFlag::no_atoms_above_threshold: return "no atoms above threshold";
  }
  return "unknown";
}

std::size_t SparseCode::nnz() const { return nnz_above(0.0); }

std::size_t SparseCode::nnz_above(double cutoff) const {
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    const double a = std::abs(coeffs[j]);
    if (a != 0.0 && a >= cutoff) ++count;
  }
  return count;
}

double residual_norm(const Dictionary& dict, std::span<const double> y, const Vector& coeffs) {
  if (y.size() != dict.dim() || static_cast<std::size_t>(coeffs.size()) != dict.size()) {
    throw Error(ErrorCode::dimension_mismatch, "residual_norm: dimension mismatch");
  }
  Vector approx(dict.dim());
  kernels::combine(dict.atoms().data(), dict.dim(), dict.size(), as_span(coeffs), as_span(approx));
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - approx[static_cast<Eigen::Index>(i)];
    acc += d * d;
  }
  return std::sqrt(acc);
}

SparseCode make_code(const Dictionary& dict, std::span<const double> y, Vector coeffs) {
  SparseCode code;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] != 0.0) code.support.push_back(static_cast<std::uint32_t>(j));
  }
  code.residual_norm = residual_norm(dict, y, coeffs);
  code.coeffs = std::move(coeffs);
  return code;
}

std::vector<std::uint8_t> encode_codes(const CodeSet& set) {
  io::Writer w;
  w.magic(kMagic);
  w.u32(static_cast<std::uint32_t>(set.codes.size()));
  w.u32(static_cast<std::uint32_t>(set.atom_count));
  for (const SparseCode& c : set.codes) {
    if (static_cast<std::size_t>(c.coeffs.size()) != set.atom_count) {
      throw Error(ErrorCode::dimension_mismatch, "code length differs from atom count");
    }
    std::vector<std::uint32_t> entries;
    for (std::uint32_t j : c.support) {
      if (c.coeffs[j] != 0.0) entries.push_back(j);
    }
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (std::uint32_t j : entries) {
      w.u32(j);
      w.f64(c.coeffs[j]);
    }
    w.f64(c.residual_norm);
  }
  return w.bytes();
}

CodeSet decode_codes(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::Reader r(bytes, source);
  r.expect_magic(kMagic);
  CodeSet set;
  const std::uint32_t n = r.u32();
  set.atom_count = r.u32();
  set.codes.reserve(n);
  for (std::uint32_t row = 0; row < n; ++row) {
    SparseCode c;
    c.coeffs = Vector::Zero(static_cast<Eigen::Index>(set.atom_count));
    const std::uint32_t nnz = r.u32();
    if (nnz > set.atom_count) throw Error(ErrorCode::malformed, source + ": nnz exceeds atom count");
    r.require(static_cast<std::size_t>(nnz) * 12, "code entries");
    for (std::uint32_t k = 0; k < nnz; ++k) {
      const std::uint32_t j = r.u32();
      const double v = r.f64();
      if (j >= set.atom_count || c.coeffs[j] != 0.0) {
        throw Error(ErrorCode::malformed, source + ": bad index in row " + std::to_string(row));
      }
      c.coeffs[j] = v;
      c.support.push_back(j);
    }
    c.residual_norm = r.f64();
    set.codes.push_back(std::move(c));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::malformed, source + ": trailing bytes");
  return set;
}

void save_codes(const CodeSet& codes, const std::filesystem::path& path) {
  io::write_file(path, encode_codes(codes));
}

CodeSet load_codes(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_codes(bytes, path.string());
}

std::string codes_to_csv(const CodeSet& set) {
  std::ostringstream out;
  out << "row,index,value\n";
  for (std::size_t row = 0; row < set.codes.size(); ++row) {
    const SparseCode& c = set.codes[row];
    for (std::uint32_t j : c.support) {
      if (c.coeffs[j] == 0.0) continue;
      out << row << ',' << j << ',' << io::format_double(c.coeffs[j]) << '\n';
    }
  }
  return out.str();
}

}  // namespace sparseanom
