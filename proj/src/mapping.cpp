#include "cimpmm/mapping.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "cimpmm/error.hpp"
#include "cimpmm/poly.hpp"

namespace cimpmm {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void mask_tail(std::span<u64> out, std::size_t count) {
  for (std::size_t w = 0; w < out.size(); ++w) {
    const std::size_t lo = w * 64;
    if (lo >= count) {
      out[w] = 0;
    } else if (count - lo < 64) {
      out[w] &= (u64{1} << (count - lo)) - 1;
    }
  }
}

// 64 bits of `bits` starting at `pos`; positions outside the store read 0.
u64 window64(const std::vector<u64>& bits, std::int64_t pos) {
  const auto total = static_cast<std::int64_t>(bits.size() * 64);
  if (pos >= total || pos <= -64) return 0;
  if (pos < 0) return bits[0] << static_cast<unsigned>(-pos);
  const auto w = static_cast<std::size_t>(pos / 64);
  const auto sh = static_cast<unsigned>(pos % 64);
  u64 out = bits[w] >> sh;
  if (sh && w + 1 < bits.size()) out |= bits[w + 1] << (64 - sh);
  return out;
}

}  // namespace

void WeightLayout::extract_column(unsigned bit, std::size_t col, std::size_t row0, std::size_t count,
                                  std::span<u64> out) const {
  std::fill(out.begin(), out.end(), 0);
  const std::size_t end = std::min(rows(), row0 + count);
  for (std::size_t r = row0; r < end; ++r) {
    if ((entry(r, col) >> bit) & 1U) out[(r - row0) / 64] |= u64{1} << ((r - row0) % 64);
  }
}

WeightMatrix WeightLayout::dense() const {
  WeightMatrix m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entry(r, c);
    }
  }
  return m;
}

ConvMatrix::ConvMatrix(const Polynomial& a) : generator_(a) {
  const std::size_t n = a.size();
  const unsigned k = params().k;
  reversed_.assign(k, std::vector<u64>(ceil_div(n, 64), 0));
  for (std::size_t t = 0; t < n; ++t) {
    const u64 v = a[n - 1 - t];
    for (unsigned b = 0; b < k; ++b) {
      if ((v >> b) & 1U) reversed_[b][t / 64] |= u64{1} << (t % 64);
    }
  }
}

u64 ConvMatrix::entry(std::size_t r, std::size_t c) const {
  if (c < r || c - r >= generator_.size()) return 0;
  return generator_[c - r];
}

void ConvMatrix::extract_column(unsigned bit, std::size_t col, std::size_t row0, std::size_t count,
                                std::span<u64> out) const {
  // Row r = row0 + i reads A[col - r], i.e. reversed position n - 1 - col + row0 + i.
  const auto n = static_cast<std::int64_t>(generator_.size());
  const std::int64_t start = n - 1 - static_cast<std::int64_t>(col) + static_cast<std::int64_t>(row0);
  const auto& rev = reversed_[bit];
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = window64(rev, start + static_cast<std::int64_t>(w * 64));
  // Mask positions past A's range (t >= n) and rows past the matrix.
  const std::size_t valid_rows = row0 >= rows() ? 0 : std::min(count, rows() - row0);
  const std::int64_t valid_t = std::max<std::int64_t>(0, n - start);
  mask_tail(out, std::min<std::size_t>(valid_rows, static_cast<std::size_t>(valid_t)));
}

WideVector ConvMatrix::multiply(const Polynomial& b) const { return poly_mul_conv1d(generator_, b); }

ConvMatrix build_conv_matrix(const Polynomial& a) { return ConvMatrix(a); }

DenseWeights::DenseWeights(WeightMatrix weights, unsigned bits) : weights_(std::move(weights)), bits_(bits) {
  if (bits_ < 1 || bits_ > 64) throw ConfigError("weight bitwidth must be in [1, 64]");
  if (bits_ < 64) {
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      if (weights_.data()[i] >> bits_) throw RangeError("weight does not fit the declared bitwidth");
    }
  }
}

std::vector<BitPlane> bit_slice_weights(const WeightLayout& m, unsigned k) {
  const auto rows = static_cast<Eigen::Index>(m.rows());
  const auto cols = static_cast<Eigen::Index>(m.cols());
  std::vector<BitPlane> planes(k);
  for (unsigned b = 0; b < k; ++b) {
    planes[b].bit_index = b;
    planes[b].bits = BinaryMatrix::Zero(rows, cols);
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const u64 v = m.entry(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (k < 64 && (v >> k)) throw RangeError("weight wider than the requested bit count");
      for (unsigned b = 0; b < k; ++b) planes[b].bits(r, c) = static_cast<std::uint8_t>((v >> b) & 1U);
    }
  }
  return planes;
}

std::vector<BitVector> bit_slice_input(std::span<const u64> values, unsigned k) {
  std::vector<BitVector> out(k, BitVector::Zero(static_cast<Eigen::Index>(values.size())));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (k < 64 && (values[i] >> k)) throw RangeError("input coefficient wider than the requested bit count");
    for (unsigned t = 0; t < k; ++t) out[t](static_cast<Eigen::Index>(i)) = static_cast<std::uint8_t>((values[i] >> t) & 1U);
  }
  return out;
}

std::vector<BitVector> bit_slice_input(const Polynomial& b, unsigned k) { return bit_slice_input(b.coeffs(), k); }

BinaryMatrix TileGrid::reassemble() const {
  BinaryMatrix m = BinaryMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < row_tiles; ++i) {
    for (std::size_t j = 0; j < col_tiles; ++j) {
      const PackedTile& t = at(i, j);
      for (std::size_t c = 0; c < t.cols(); ++c) {
        for (std::size_t r = 0; r < t.rows(); ++r) {
          const std::size_t gr = i * t.rows() + r;
          const std::size_t gc = j * t.cols() + c;
          if (gr < rows && gc < cols) m(static_cast<Eigen::Index>(gr), static_cast<Eigen::Index>(gc)) = t.get(r, c);
        }
      }
    }
  }
  return m;
}

TileGrid tile(const BitPlane& plane, const CrossbarConfig& cfg) {
  TileGrid g;
  g.rows = static_cast<std::size_t>(plane.bits.rows());
  g.cols = static_cast<std::size_t>(plane.bits.cols());
  g.row_tiles = ceil_div(g.rows, cfg.rows);
  g.col_tiles = ceil_div(g.cols, cfg.cols);
  g.tiles.reserve(g.row_tiles * g.col_tiles);
  for (std::size_t i = 0; i < g.row_tiles; ++i) {
    for (std::size_t j = 0; j < g.col_tiles; ++j) {
      PackedTile t(cfg.rows, cfg.cols);
      for (std::size_t c = 0; c < cfg.cols; ++c) {
        for (std::size_t r = 0; r < cfg.rows; ++r) {
          const std::size_t gr = i * cfg.rows + r;
          const std::size_t gc = j * cfg.cols + c;
          if (gr < g.rows && gc < g.cols && plane.bits(static_cast<Eigen::Index>(gr), static_cast<Eigen::Index>(gc))) {
            t.set(r, c, true);
          }
        }
      }
      g.tiles.push_back(std::move(t));
    }
  }
  return g;
}

std::size_t TileDeduper::insert(const PackedTile& t) {
  const std::size_t h = t.hash();
  auto [lo, hi] = index_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (physical_[it->second] == t) return it->second;
  }
  const std::size_t id = physical_.size();
  physical_.push_back(t);
  index_.emplace(h, id);
  return id;
}

DedupResult dedup(std::span<const TileGrid> grids) {
  TileDeduper store;
  DedupResult out;
  for (const auto& g : grids) {
    auto& ids = out.reuse_map.emplace_back();
    for (const auto& t : g.tiles) ids.push_back(store.insert(t));
  }
  out.physical = store.release();
  return out;
}

std::string to_string(MappingMode mode) {
  return mode == MappingMode::BitMapping ? "bit-mapping" : "conventional";
}

MappingMode mapping_mode_from_string(const std::string& s) {
  if (s == "bit-mapping" || s == "bm" || s == "bit") return MappingMode::BitMapping;
  if (s == "conventional" || s == "conv") return MappingMode::Conventional;
  throw ConfigError("unknown mapping mode '" + s + "'");
}

std::size_t MappingPlan::instantiated_arrays() const {
  return array_budget ? std::min(*array_budget, physical_count()) : physical_count();
}

double MappingPlan::reuse_factor() const {
  return physical_count() ? static_cast<double>(logical_count()) / static_cast<double>(physical_count()) : 0.0;
}

std::size_t MappingPlan::distinct_in_pe(std::size_t pe) const {
  std::set<std::size_t> ids;
  for (std::size_t i = 0; i < logical_tiles.size(); ++i) {
    if (logical_tiles[i].pe == pe) ids.insert(reuse_map[i]);
  }
  return ids.size();
}

namespace {

MappingPlan plan_skeleton(MappingMode mode, const WeightLayout& w, const CrossbarConfig& cfg,
                          std::optional<std::size_t> array_budget) {
  cfg.validate();
  if (array_budget && *array_budget < 1) throw ConfigError("array budget must be at least 1");
  MappingPlan plan;
  plan.mode = mode;
  plan.xbar = cfg;
  plan.weight_rows = w.rows();
  plan.weight_cols = w.cols();
  plan.weight_bits = w.weight_bits();
  plan.array_budget = array_budget;
  plan.row_tiles = ceil_div(w.rows(), cfg.rows);
  return plan;
}

void finish_plan(MappingPlan& plan, TileDeduper& store) {
  plan.physical_arrays = store.release();
  if (plan.array_budget && *plan.array_budget < plan.physical_count()) {
    plan.time_multiplex = ceil_div(plan.physical_count(), *plan.array_budget);
  }
  plan.adder_tree_nodes = plan.pe_count * (plan.row_tiles - 1) * plan.col_tiles;
}

}  // namespace

MappingPlan plan_bit_mapping(const WeightLayout& w, const CrossbarConfig& cfg, std::optional<std::size_t> array_budget) {
  MappingPlan plan = plan_skeleton(MappingMode::BitMapping, w, cfg, array_budget);
  const unsigned k = w.weight_bits();
  plan.bit_cols = w.cols();
  plan.col_tiles = ceil_div(plan.bit_cols, cfg.cols);
  plan.pe_count = k;
  for (unsigned b = 0; b < k; ++b) plan.pe_shift.push_back(b);
  // One shifter per PE folds input-bit significance; weight significance is
  // resolved by the tile accumulator.
  plan.shift_adder_count = k;

  TileDeduper store;
  for (unsigned b = 0; b < k; ++b) {
    for (std::size_t i = 0; i < plan.row_tiles; ++i) {
      const std::size_t row0 = i * cfg.rows;
      const std::size_t count = std::min(cfg.rows, w.rows() - row0);
      for (std::size_t j = 0; j < plan.col_tiles; ++j) {
        PackedTile t(cfg.rows, cfg.cols);
        for (std::size_t cc = 0; cc < cfg.cols; ++cc) {
          const std::size_t c = j * cfg.cols + cc;
          if (c >= w.cols()) break;
          w.extract_column(b, c, row0, count, t.column(cc));
        }
        plan.logical_tiles.push_back({b, i, j});
        plan.reuse_map.push_back(store.insert(t));
      }
    }
  }
  finish_plan(plan, store);
  return plan;
}

MappingPlan plan_conventional(const WeightLayout& w, const CrossbarConfig& cfg, std::optional<std::size_t> array_budget) {
  MappingPlan plan = plan_skeleton(MappingMode::Conventional, w, cfg, array_budget);
  const unsigned k = w.weight_bits();
  plan.bit_cols = w.cols() * k;
  plan.col_tiles = ceil_div(plan.bit_cols, cfg.cols);
  plan.pe_count = 1;
  plan.pe_shift.push_back(0);

  TileDeduper store;
  for (std::size_t i = 0; i < plan.row_tiles; ++i) {
    const std::size_t row0 = i * cfg.rows;
    const std::size_t count = std::min(cfg.rows, w.rows() - row0);
    for (std::size_t j = 0; j < plan.col_tiles; ++j) {
      PackedTile t(cfg.rows, cfg.cols);
      for (std::size_t cc = 0; cc < cfg.cols; ++cc) {
        const std::size_t gc = j * cfg.cols + cc;
        if (gc >= plan.bit_cols) break;
        w.extract_column(static_cast<unsigned>(gc % k), gc / k, row0, count, t.column(cc));
      }
      plan.logical_tiles.push_back({0, i, j});
      plan.reuse_map.push_back(store.insert(t));
    }
  }
  // One shift-add unit per k-column weight group in every array.
  plan.shift_adder_count = plan.logical_count() * std::max<std::size_t>(1, cfg.cols / k);
  finish_plan(plan, store);
  return plan;
}

MappingPlan plan_mapping(MappingMode mode, const WeightLayout& w, const CrossbarConfig& cfg,
                         std::optional<std::size_t> array_budget) {
  return mode == MappingMode::BitMapping ? plan_bit_mapping(w, cfg, array_budget)
                                         : plan_conventional(w, cfg, array_budget);
}

MappingPlan plan_bit_mapping(const Polynomial& a, const CrossbarConfig& cfg, std::optional<std::size_t> array_budget) {
  return plan_bit_mapping(ConvMatrix(a), cfg, array_budget);
}

MappingPlan plan_conventional(const Polynomial& a, const CrossbarConfig& cfg, std::optional<std::size_t> array_budget) {
  return plan_conventional(ConvMatrix(a), cfg, array_budget);
}

WeightMatrix reconstruct_weights(const MappingPlan& plan) {
  WeightMatrix m = WeightMatrix::Zero(static_cast<Eigen::Index>(plan.weight_rows),
                                      static_cast<Eigen::Index>(plan.weight_cols));
  const std::size_t R = plan.xbar.rows, C = plan.xbar.cols;
  const unsigned k = plan.weight_bits;
  for (std::size_t l = 0; l < plan.logical_count(); ++l) {
    const LogicalTile& lt = plan.logical_tiles[l];
    const PackedTile& t = plan.physical_arrays[plan.reuse_map[l]];
    for (std::size_t cc = 0; cc < C; ++cc) {
      const std::size_t gc = lt.col_tile * C + cc;
      if (gc >= plan.bit_cols) break;
      const std::size_t col = plan.mode == MappingMode::BitMapping ? gc : gc / k;
      const unsigned bit = plan.mode == MappingMode::BitMapping ? plan.pe_shift[lt.pe] : static_cast<unsigned>(gc % k);
      for (std::size_t rr = 0; rr < R; ++rr) {
        const std::size_t r = lt.row_tile * R + rr;
        if (r >= plan.weight_rows) break;
        if (t.get(rr, cc)) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += u64{1} << bit;
      }
    }
  }
  return m;
}

MappingPlan materialize_logical(const MappingPlan& plan) {
  MappingPlan out = plan;
  out.physical_arrays.clear();
  out.physical_arrays.reserve(plan.logical_count());
  for (std::size_t l = 0; l < plan.logical_count(); ++l) {
    out.physical_arrays.push_back(plan.physical_arrays[plan.reuse_map[l]]);
    out.reuse_map[l] = l;
  }
  out.time_multiplex = 1;
  if (out.array_budget && *out.array_budget < out.physical_count()) {
    out.time_multiplex = ceil_div(out.physical_count(), *out.array_budget);
  }
  return out;
}

}  // namespace cimpmm
