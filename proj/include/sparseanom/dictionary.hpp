#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparseanom/linalg.hpp"

namespace sparseanom {

// Contiguous range of atom indices [start, start + length).
struct Block {
  std::uint32_t start = 0;
  std::uint32_t length = 0;
  bool operator==(const Block&) const = default;
};

// p x m matrix whose columns (atoms) have unit L2 norm, plus an optional
// partition of the atoms into blocks. Immutable once built.
class Dictionary {
 public:
  // Validates unit norms (within 1e-9) and, if given, that blocks are
  // disjoint and cover 0..m-1. Throws Error(invalid_argument) otherwise.
  explicit Dictionary(Matrix atoms, std::vector<Block> blocks = {});

  const Matrix& atoms() const { return atoms_; }
  std::size_t dim() const { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(atoms_.cols()); }
  std::span<const double> atom(std::size_t j) const { return col_span(atoms_, static_cast<Eigen::Index>(j)); }

  bool has_blocks() const { return !blocks_.empty(); }
  const std::vector<Block>& blocks() const { return blocks_; }
  Dictionary with_blocks(std::vector<Block> blocks) const;

  bool operator==(const Dictionary& other) const;

 private:
  Matrix atoms_;
  std::vector<Block> blocks_;
};

inline constexpr double kUnitNormTolerance = 1e-9;

// count equal contiguous ranges over m atoms; the first m % count blocks get
// one extra atom.
std::vector<Block> equal_blocks(std::size_t m, std::size_t count);

// Throws Error(invalid_argument) unless blocks partition 0..m-1.
void validate_blocks(const std::vector<Block>& blocks, std::size_t m);

struct NormalizeResult {
  Matrix atoms;
  std::vector<std::size_t> replaced;  // zero columns swapped for random unit vectors
};

// Scales every column to unit norm. Zero columns become unit vectors drawn
// from Rng(seed), in column order.
NormalizeResult normalize_atoms(Matrix atoms, std::uint64_t seed);

struct TrainConfig {
  std::size_t atom_count = 1000;
  std::size_t sparsity = 5;  // max non-zeros per training code
  std::size_t sweeps = 20;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::size_t threads = 0;  // coding-stage workers; 0 = hardware concurrency
};

struct TrainResult {
  Dictionary dictionary;
  // sweep_errors[s] = sum_i ||y_i - D x_i||^2 after sweep s (post atom update).
  std::vector<double> sweep_errors;
  // Total squared error of the very first coding pass, before any update.
  double initial_error = 0.0;
  std::size_t replaced_atoms = 0;  // dead atoms re-seeded across all sweeps
};

// K-SVD. features is n x p, one training vector per row.
TrainResult ksvd_train(const RowMatrix& features, const TrainConfig& cfg);

// Binary format "SADICT01"; see README for the layout.
void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary load_dictionary(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_dictionary(const Dictionary& dict);
Dictionary decode_dictionary(std::span<const std::uint8_t> bytes, const std::string& source);

// One atom per line, comma separated.
std::string dictionary_to_csv(const Dictionary& dict);

}  // namespace sparseanom
