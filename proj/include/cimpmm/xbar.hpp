#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cimpmm/modarith.hpp"

namespace cimpmm {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using BitVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// Geometry, converter and noise parameters of one crossbar array.
struct CrossbarConfig {
  std::size_t rows = 128;
  std::size_t cols = 128;
  unsigned adc_bits = 8;
  std::size_t cols_per_adc = 8;
  double noise_sigma = 0.0;  // in units of one cell current
  double flip_prob = 0.0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  std::size_t adcs_per_array() const { return cols / cols_per_adc; }
  bool noisy() const { return noise_sigma > 0.0 || flip_prob > 0.0; }
  /// True when every column count 0..rows has its own ADC code.
  bool lossless() const;
};

/// Column-major bit-packed binary block; the storage format shared by tiles
/// and programmed arrays.
class PackedTile {
 public:
  PackedTile() = default;
  PackedTile(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_col() const { return words_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[c * words_ + r / 64] >> (r % 64)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    u64& w = data_[c * words_ + r / 64];
    const u64 bit = u64{1} << (r % 64);
    w = v ? (w | bit) : (w & ~bit);
  }
  std::span<const u64> column(std::size_t c) const { return {data_.data() + c * words_, words_}; }
  std::span<u64> column(std::size_t c) { return {data_.data() + c * words_, words_}; }

  bool is_zero() const;
  std::size_t popcount() const;
  std::size_t hash() const;

  BinaryMatrix to_matrix() const;
  static PackedTile from_matrix(const BinaryMatrix& m);

  bool operator==(const PackedTile&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<u64> data_;
};

struct ColumnReadout {
  Eigen::VectorXi raw;        // exact (or noisy, rounded) column counts
  Eigen::VectorXi quantized;  // ADC codes
  std::size_t adc_conversions = 0;
};

/// A programmed R x C grid of binary cells.
class CrossbarArray {
 public:
  explicit CrossbarArray(const CrossbarConfig& config);

  const CrossbarConfig& config() const { return config_; }
  const BinaryMatrix& cells() const { return cells_; }
  const PackedTile& packed() const { return packed_; }

  /// Returns a copy holding `bits`; throws DimensionMismatch on shape errors.
  CrossbarArray programmed(const BinaryMatrix& bits) const;
  CrossbarArray programmed(const PackedTile& bits) const;

  /// Column counts for a packed input (ceil(R/64) words), written to `raw`.
  void column_counts(std::span<const u64> input, std::span<std::int32_t> raw) const;

  /// Applies cell flips, column noise, clamp and rounding in place.
  void perturb(std::span<const u64> input, std::span<std::int32_t> raw, std::mt19937_64& rng) const;

  /// ADC transfer: linear with unit step, clamped at 2^p - 1.
  std::int32_t quantize(std::int32_t count) const { return count < 0 ? 0 : (count > adc_max_ ? adc_max_ : count); }

 private:
  CrossbarConfig config_;
  BinaryMatrix cells_;
  PackedTile packed_;
  std::int32_t adc_max_ = 0;
};

CrossbarArray program(const CrossbarArray& array, const BinaryMatrix& bits);

/// Packs a 0/1 vector into 64-bit words, LSB first.
std::vector<u64> pack_bits(const BitVector& v);

ColumnReadout vmm_exact(const CrossbarArray& array, const BitVector& v);
ColumnReadout vmm_noisy(const CrossbarArray& array, const BitVector& v, std::uint64_t rng_seed);

}  // namespace cimpmm
