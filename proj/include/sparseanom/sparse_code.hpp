#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparseanom/linalg.hpp"

namespace sparseanom {

class Dictionary;

// Non-fatal conditions a coder hit while producing a code.
enum class CodeFlag : std::uint8_t {
  none = 0,
  rank_deficient,            // OMP/StOMP dropped a dependent atom and stopped
  no_atoms_above_threshold,  // StOMP selected nothing in its first stage
};

const char* to_string(CodeFlag flag) noexcept;

struct SparseCode {
  Vector coeffs;                    // length m, zero outside support
  std::vector<std::uint32_t> support;  // distinct indices, in selection order
  double residual_norm = 0.0;       // ||y - D coeffs||_2
  std::size_t iterations = 0;
  CodeFlag flag = CodeFlag::none;
  // Residual norm after each iteration/stage (index 0 = ||y||).
  std::vector<double> residual_history;

  std::size_t nnz() const;
  // Non-zeros with |x_j| >= cutoff.
  std::size_t nnz_above(double cutoff) const;
};

// Builds a code from a dense vector: support = non-zero entries in index
// order, residual recomputed against D.
SparseCode make_code(const Dictionary& dict, std::span<const double> y, Vector coeffs);

// ||y - D x||_2 computed through the dispatching kernels.
double residual_norm(const Dictionary& dict, std::span<const double> y, const Vector& coeffs);

// Magnitudes below this are treated as zero in density statistics.
inline constexpr double kDensityCutoff = 1e-10;

// "SACODE01": u32 n, u32 m, then per row u32 nnz, nnz x (u32 index, f64 value),
// f64 residual_norm. Entries are written in support order.
struct CodeSet {
  std::size_t atom_count = 0;
  std::vector<SparseCode> codes;
};

void save_codes(const CodeSet& codes, const std::filesystem::path& path);
CodeSet load_codes(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_codes(const CodeSet& codes);
CodeSet decode_codes(std::span<const std::uint8_t> bytes, const std::string& source);
// row,index,value lines with a header.
std::string codes_to_csv(const CodeSet& codes);

}  // namespace sparseanom
