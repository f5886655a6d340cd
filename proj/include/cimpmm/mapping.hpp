#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "cimpmm/ring.hpp"
#include "cimpmm/xbar.hpp"

namespace cimpmm {

using WeightMatrix = Eigen::Matrix<u64, Eigen::Dynamic, Eigen::Dynamic>;

/// Read-only view of an unsigned weight matrix that can hand out packed
/// bit columns. Rows are the input dimension, columns the outputs.
class WeightLayout {
 public:
  virtual ~WeightLayout() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual unsigned weight_bits() const = 0;
  virtual u64 entry(std::size_t r, std::size_t c) const = 0;

  /// Writes bit `bit` of column `col`, rows [row0, row0 + count), into
  /// `out` (LSB first). Words past `count` bits are zeroed.
  virtual void extract_column(unsigned bit, std::size_t col, std::size_t row0, std::size_t count,
                              std::span<u64> out) const;

  WeightMatrix dense() const;
};

/// The n x (2n-1) convolution matrix of a resident polynomial, stored
/// implicitly: entry(r, c) = A[c - r] when 0 <= c - r < n, else 0.
class ConvMatrix final : public WeightLayout {
 public:
  explicit ConvMatrix(const Polynomial& a);

  const RingParams& params() const { return generator_.params(); }
  const Polynomial& generator() const { return generator_; }

  std::size_t rows() const override { return generator_.size(); }
  std::size_t cols() const override { return 2 * generator_.size() - 1; }
  unsigned weight_bits() const override { return params().k; }
  u64 entry(std::size_t r, std::size_t c) const override;
  void extract_column(unsigned bit, std::size_t col, std::size_t row0, std::size_t count,
                      std::span<u64> out) const override;

  /// b (as a row vector) times the matrix, in exact integers.
  WideVector multiply(const Polynomial& b) const;

 private:
  Polynomial generator_;
  // reversed_[b] bit t = bit b of A[n - 1 - t], zero padded.
  std::vector<std::vector<u64>> reversed_;
};

ConvMatrix build_conv_matrix(const Polynomial& a);

/// An explicit weight matrix, used for twiddle matrices and small examples.
class DenseWeights final : public WeightLayout {
 public:
  DenseWeights(WeightMatrix weights, unsigned bits);

  std::size_t rows() const override { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t cols() const override { return static_cast<std::size_t>(weights_.cols()); }
  unsigned weight_bits() const override { return bits_; }
  u64 entry(std::size_t r, std::size_t c) const override {
    return weights_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  const WeightMatrix& matrix() const { return weights_; }

 private:
  WeightMatrix weights_;
  unsigned bits_;
};

/// Bit b of every weight, same shape as the source matrix.
struct BitPlane {
  unsigned bit_index = 0;
  BinaryMatrix bits;
};

std::vector<BitPlane> bit_slice_weights(const WeightLayout& m, unsigned k);

/// Input bit-planes, LSB first: result[t](i) = bit t of b[i].
std::vector<BitVector> bit_slice_input(const Polynomial& b, unsigned k);
std::vector<BitVector> bit_slice_input(std::span<const u64> values, unsigned k);

/// R x C blocks covering a binary matrix, row-major, ragged edges zero padded.
struct TileGrid {
  std::size_t rows = 0;  // source shape
  std::size_t cols = 0;
  std::size_t row_tiles = 0;
  std::size_t col_tiles = 0;
  std::vector<PackedTile> tiles;

  const PackedTile& at(std::size_t i, std::size_t j) const { return tiles[i * col_tiles + j]; }
  BinaryMatrix reassemble() const;
};

TileGrid tile(const BitPlane& plane, const CrossbarConfig& cfg);

/// Content-addressed store of distinct tiles; the first occurrence of a
/// content becomes its canonical physical array.
class TileDeduper {
 public:
  std::size_t insert(const PackedTile& t);
  const std::vector<PackedTile>& physical() const { return physical_; }
  std::vector<PackedTile> release() { return std::move(physical_); }

 private:
  std::vector<PackedTile> physical_;
  std::unordered_multimap<std::size_t, std::size_t> index_;
};

struct DedupResult {
  std::vector<PackedTile> physical;
  std::vector<std::vector<std::size_t>> reuse_map;  // [grid][tile] -> physical id
};

DedupResult dedup(std::span<const TileGrid> grids);

enum class MappingMode { BitMapping, Conventional };

std::string to_string(MappingMode mode);
MappingMode mapping_mode_from_string(const std::string& s);

struct LogicalTile {
  std::size_t pe = 0;
  std::size_t row_tile = 0;
  std::size_t col_tile = 0;
};

/// Assignment of weight bits to PEs, PE tiles to logical arrays, and
/// logical arrays to deduplicated physical arrays.
struct MappingPlan {
  MappingMode mode = MappingMode::BitMapping;
  CrossbarConfig xbar;

  std::size_t weight_rows = 0;
  std::size_t weight_cols = 0;
  unsigned weight_bits = 0;
  // Array columns in use per PE: weight_cols (bit mapping) or
  // weight_cols * weight_bits interleaved (conventional).
  std::size_t bit_cols = 0;
  std::size_t row_tiles = 0;
  std::size_t col_tiles = 0;

  std::size_t pe_count = 0;
  // Weight significance of each PE output; bit b for bit mapping, 0 for the
  // single conventional PE.
  std::vector<unsigned> pe_shift;
  std::vector<LogicalTile> logical_tiles;  // ordered by (pe, row_tile, col_tile)
  std::vector<PackedTile> physical_arrays;
  std::vector<std::size_t> reuse_map;  // logical index -> physical id

  std::size_t shift_adder_count = 0;
  std::size_t accumulator_count = 1;
  std::size_t adder_tree_nodes = 0;
  std::optional<std::size_t> array_budget;
  std::size_t time_multiplex = 1;

  std::size_t logical_count() const { return logical_tiles.size(); }
  std::size_t physical_count() const { return physical_arrays.size(); }
  /// Arrays that exist in silicon: physical arrays, capped by the budget.
  std::size_t instantiated_arrays() const;
  std::size_t arrays_per_pe() const { return row_tiles * col_tiles; }
  double reuse_factor() const;
  /// Distinct physical arrays referenced from PE `pe`.
  std::size_t distinct_in_pe(std::size_t pe) const;
};

MappingPlan plan_bit_mapping(const WeightLayout& w, const CrossbarConfig& cfg,
                             std::optional<std::size_t> array_budget = std::nullopt);
MappingPlan plan_conventional(const WeightLayout& w, const CrossbarConfig& cfg,
                              std::optional<std::size_t> array_budget = std::nullopt);
MappingPlan plan_mapping(MappingMode mode, const WeightLayout& w, const CrossbarConfig& cfg,
                         std::optional<std::size_t> array_budget = std::nullopt);

MappingPlan plan_bit_mapping(const Polynomial& a, const CrossbarConfig& cfg,
                             std::optional<std::size_t> array_budget = std::nullopt);
MappingPlan plan_conventional(const Polynomial& a, const CrossbarConfig& cfg,
                              std::optional<std::size_t> array_budget = std::nullopt);

/// Rebuilds the weight matrix from physical arrays through reuse_map.
WeightMatrix reconstruct_weights(const MappingPlan& plan);

/// Same plan with every logical tile given its own physical copy.
MappingPlan materialize_logical(const MappingPlan& plan);

/// Structured text listing of a plan (the dump-plan document).
std::string describe_plan(const MappingPlan& plan);

}  // namespace cimpmm
