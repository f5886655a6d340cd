#include "cimpmm/xbar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cimpmm/error.hpp"

namespace cimpmm {

void CrossbarConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("crossbar needs at least one row and column");
  if (adc_bits < 1 || adc_bits > 30) throw ConfigError("ADC precision must be in [1, 30] bits");
  if (cols_per_adc < 1 || cols % cols_per_adc != 0) {
    throw ConfigError("cols_per_adc must divide the column count");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
  if (!(flip_prob >= 0.0 && flip_prob < 0.5)) throw ConfigError("flip_prob must be in [0, 0.5)");
}

bool CrossbarConfig::lossless() const {
  return (std::size_t{1} << adc_bits) - 1 >= rows;
}

PackedTile::PackedTile(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((rows + 63) / 64), data_(cols * ((rows + 63) / 64), 0) {}

bool PackedTile::is_zero() const {
  for (u64 w : data_) {
    if (w) return false;
  }
  return true;
}

std::size_t PackedTile::popcount() const {
  std::size_t total = 0;
  for (u64 w : data_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t PackedTile::hash() const {
  // FNV-1a over the words, seeded with the shape.
  std::size_t h = 1469598103934665603ULL ^ (rows_ * 1000003ULL + cols_);
  for (u64 w : data_) {
    h ^= w;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return h;
}

BinaryMatrix PackedTile::to_matrix() const {
  BinaryMatrix m(rows_, cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t r = 0; r < rows_; ++r) m(r, c) = get(r, c) ? 1 : 0;
  }
  return m;
}

PackedTile PackedTile::from_matrix(const BinaryMatrix& m) {
  PackedTile t(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) > 1) throw RangeError("crossbar cells must be 0 or 1");
      if (m(r, c)) t.set(r, c, true);
    }
  }
  return t;
}

CrossbarArray::CrossbarArray(const CrossbarConfig& config)
    : config_(config),
      cells_(BinaryMatrix::Zero(config.rows, config.cols)),
      packed_(config.rows, config.cols) {
  config_.validate();
  const std::int64_t full = (std::int64_t{1} << config_.adc_bits) - 1;
  adc_max_ = static_cast<std::int32_t>(full);
}

CrossbarArray CrossbarArray::programmed(const BinaryMatrix& bits) const {
  if (static_cast<std::size_t>(bits.rows()) != config_.rows ||
      static_cast<std::size_t>(bits.cols()) != config_.cols) {
    throw DimensionMismatch("programming matrix does not match the array shape");
  }
  CrossbarArray out(*this);
  out.packed_ = PackedTile::from_matrix(bits);
  out.cells_ = bits;
  return out;
}

CrossbarArray CrossbarArray::programmed(const PackedTile& bits) const {
  if (bits.rows() != config_.rows || bits.cols() != config_.cols) {
    throw DimensionMismatch("programming tile does not match the array shape");
  }
  CrossbarArray out(*this);
  out.packed_ = bits;
  out.cells_ = bits.to_matrix();
  return out;
}

void CrossbarArray::column_counts(std::span<const u64> input, std::span<std::int32_t> raw) const {
  const std::size_t words = packed_.words_per_col();
  for (std::size_t c = 0; c < config_.cols; ++c) {
    const auto col = packed_.column(c);
    std::int32_t s = 0;
    for (std::size_t w = 0; w < words; ++w) s += std::popcount(col[w] & input[w]);
    raw[c] = s;
  }
}

void CrossbarArray::perturb(std::span<const u64> input, std::span<std::int32_t> raw, std::mt19937_64& rng) const {
  const auto R = static_cast<std::int32_t>(config_.rows);
  if (config_.flip_prob > 0.0) {
    std::bernoulli_distribution flip(config_.flip_prob);
    for (std::size_t c = 0; c < config_.cols; ++c) {
      for (std::size_t r = 0; r < config_.rows; ++r) {
        if (!((input[r / 64] >> (r % 64)) & 1U)) continue;
        if (flip(rng)) raw[c] += packed_.get(r, c) ? -1 : 1;
      }
    }
  }
  if (config_.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, config_.noise_sigma);
    for (std::size_t c = 0; c < config_.cols; ++c) {
      double current = static_cast<double>(raw[c]) + noise(rng);
      current = std::clamp(current, 0.0, static_cast<double>(R));
      raw[c] = static_cast<std::int32_t>(std::lround(current));
    }
  }
}

CrossbarArray program(const CrossbarArray& array, const BinaryMatrix& bits) { return array.programmed(bits); }

std::vector<u64> pack_bits(const BitVector& v) {
  std::vector<u64> words((static_cast<std::size_t>(v.size()) + 63) / 64, 0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) > 1) throw RangeError("input vector must be binary");
    if (v(i)) words[static_cast<std::size_t>(i) / 64] |= u64{1} << (i % 64);
  }
  return words;
}

namespace {

ColumnReadout readout(const CrossbarArray& array, const BitVector& v, std::mt19937_64* rng) {
  const auto& cfg = array.config();
  if (static_cast<std::size_t>(v.size()) != cfg.rows) {
    throw DimensionMismatch("input vector length must equal the row count");
  }
  const auto input = pack_bits(v);
  std::vector<std::int32_t> raw(cfg.cols);
  array.column_counts(input, raw);
  if (rng) array.perturb(input, raw, *rng);
  ColumnReadout out;
  out.raw.resize(static_cast<Eigen::Index>(cfg.cols));
  out.quantized.resize(static_cast<Eigen::Index>(cfg.cols));
  for (std::size_t c = 0; c < cfg.cols; ++c) {
    out.raw(static_cast<Eigen::Index>(c)) = raw[c];
    out.quantized(static_cast<Eigen::Index>(c)) = array.quantize(raw[c]);
  }
  out.adc_conversions = cfg.cols;
  return out;
}

}  // namespace

ColumnReadout vmm_exact(const CrossbarArray& array, const BitVector& v) { return readout(array, v, nullptr); }

ColumnReadout vmm_noisy(const CrossbarArray& array, const BitVector& v, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return readout(array, v, &rng);
}

}  // namespace cimpmm
