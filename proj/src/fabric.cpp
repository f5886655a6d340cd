#include "cimpmm/fabric.hpp"

#include <algorithm>

#include "cimpmm/error.hpp"
#include "cimpmm/poly.hpp"

namespace cimpmm {

void FabricConfig::validate() const {
  xbar.validate();
  if (!(frequency_mhz > 0.0)) throw ConfigError("frequency must be positive");
  if (array_budget && *array_budget < 1) throw ConfigError("array budget must be at least 1");
  for (unsigned c : {timing.adc_conversion_cycles, timing.adder_tree_level_cycles, timing.shifter_cycles,
                     timing.accumulate_level_cycles, timing.reduction_batch_cycles}) {
    if (c < 1) throw ConfigError("every stage latency must be at least one cycle");
  }
}

namespace {

// Bits [row0, row0 + R) of a packed vector, as ceil(R/64) words.
void slice_bits(std::span<const u64> packed, std::size_t row0, std::size_t R, std::span<u64> out) {
  std::fill(out.begin(), out.end(), 0);
  const std::size_t total = packed.size() * 64;
  for (std::size_t w = 0; w < out.size(); ++w) {
    const std::size_t pos = row0 + w * 64;
    if (pos >= total) break;
    const std::size_t word = pos / 64, sh = pos % 64;
    u64 v = packed[word] >> sh;
    if (sh && word + 1 < packed.size()) v |= packed[word + 1] << (64 - sh);
    out[w] = v;
  }
  const std::size_t tail = R % 64;
  if (tail) out[out.size() - 1] &= (u64{1} << tail) - 1;
}

}  // namespace

Fabric Fabric::load(const MappingPlan& plan) {
  Fabric f;
  f.plan_ = plan;
  const CrossbarArray blank(plan.xbar);
  f.arrays_.reserve(plan.physical_count());
  for (const auto& contents : plan.physical_arrays) {
    f.arrays_.push_back(blank.programmed(contents));
    ++f.program_count_;
  }
  return f;
}

std::vector<std::vector<u128>> Fabric::pe_partials(const BitVector& input_bits, NoiseSource* noise,
                                                   EventCounters& counters) const {
  const MappingPlan& p = plan_;
  if (static_cast<std::size_t>(input_bits.size()) != p.weight_rows) {
    throw DimensionMismatch("input bit-plane length must equal the weight row count");
  }
  const std::size_t R = p.xbar.rows, C = p.xbar.cols;
  const std::size_t words = (R + 63) / 64;
  const auto packed = pack_bits(input_bits);
  std::vector<u64> slices(p.row_tiles * words);
  for (std::size_t i = 0; i < p.row_tiles; ++i) {
    slice_bits(packed, i * R, R, std::span<u64>(slices).subspan(i * words, words));
  }

  const bool conventional = p.mode == MappingMode::Conventional;
  const unsigned k = p.weight_bits;
  const std::size_t units_per_array = std::max<std::size_t>(1, C / k);
  const std::size_t ops_per_unit = std::min<std::size_t>(k, C);

  std::vector<std::vector<u128>> partials(p.pe_count, std::vector<u128>(p.weight_cols, 0));
  std::vector<std::int32_t> raw(C);
  for (std::size_t l = 0; l < p.logical_count(); ++l) {
    const LogicalTile& lt = p.logical_tiles[l];
    const CrossbarArray& array = arrays_[p.reuse_map[l]];
    const std::span<const u64> input(slices.data() + lt.row_tile * words, words);
    array.column_counts(input, raw);
    if (noise) array.perturb(input, raw, noise->rng);
    ++counters.array_activations;
    counters.adc_conversions += C;

    auto& lanes = partials[lt.pe];
    for (std::size_t cc = 0; cc < C; ++cc) {
      const std::size_t gc = lt.col_tile * C + cc;
      if (gc >= p.bit_cols) break;
      const auto code = static_cast<u128>(array.quantize(raw[cc]));
      if (conventional) {
        lanes[gc / k] += code << (gc % k);
      } else {
        lanes[gc] += code;
      }
    }
    if (conventional) counters.shift_add_ops += units_per_array * ops_per_unit;
  }
  counters.adder_tree_ops += p.pe_count * (p.row_tiles - 1) * p.col_tiles;
  return partials;
}

std::vector<std::vector<WideAccumulator>> Fabric::pe_compute(std::span<const u64> input, unsigned input_bits,
                                                             NoiseSource* noise, EventCounters& counters) const {
  const auto planes = bit_slice_input(input, input_bits);
  std::vector<std::vector<WideAccumulator>> acc(plan_.pe_count, std::vector<WideAccumulator>(plan_.weight_cols));
  for (unsigned t = input_bits; t-- > 0;) {
    const auto partials = pe_partials(planes[t], noise, counters);
    for (std::size_t pe = 0; pe < plan_.pe_count; ++pe) {
      for (std::size_t c = 0; c < plan_.weight_cols; ++c) acc[pe][c].shift_add(partials[pe][c]);
      if (plan_.mode == MappingMode::BitMapping) counters.shift_add_ops += plan_.weight_cols;
    }
  }
  return acc;
}

WideVector tile_accumulate(const std::vector<std::vector<WideAccumulator>>& pe_outputs,
                           std::span<const unsigned> pe_shift, EventCounters* counters) {
  if (pe_outputs.size() != pe_shift.size()) throw DimensionMismatch("one shift per PE output is required");
  WideVector w;
  if (pe_outputs.empty()) return w;
  const std::size_t lanes = pe_outputs.front().size();
  w.vals.assign(lanes, WideInt(0));
  for (std::size_t pe = 0; pe < pe_outputs.size(); ++pe) {
    if (pe_outputs[pe].size() != lanes) throw DimensionMismatch("PE outputs differ in length");
    for (std::size_t c = 0; c < lanes; ++c) {
      const auto& a = pe_outputs[pe][c];
      if (a.lo == 0 && a.hi == 0) continue;
      w.vals[c] += a.value() << pe_shift[pe];
    }
  }
  if (counters) counters->accumulate_ops += pe_outputs.size() * lanes;
  return w;
}

Polynomial tile_reduce(const WideVector& w, const RingParams& ring, const LimbReducer& reducer,
                       EventCounters* counters) {
  const auto folded = reduce_degree(w, ring);
  const unsigned limbs = LimbReducer::limbs_for_ring(ring.n, ring.k);
  std::vector<u64> c(ring.n);
  for (std::size_t i = 0; i < ring.n; ++i) c[i] = reducer.reduce(folded[i], limbs);
  if (counters) counters->reduction_ops += ring.n * limbs;
  return Polynomial(ring, std::move(c));
}

ErrorStats compare_to_oracle(const Polynomial& result, const Polynomial& oracle) {
  if (!(result.params() == oracle.params())) throw DimensionMismatch("result and oracle rings differ");
  const u64 q = oracle.params().q;
  ErrorStats s;
  s.abs_error.resize(oracle.size());
  double sum = 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const u64 d = sub_mod(result[i], oracle[i], q);
    const u64 e = std::min(d, q - d);
    s.abs_error[i] = e;
    sum += static_cast<double>(e);
    s.max_abs_error = std::max(s.max_abs_error, e);
    wrong += e != 0;
  }
  s.mean_abs_error = sum / static_cast<double>(oracle.size());
  s.error_rate = static_cast<double>(wrong) / static_cast<double>(oracle.size());
  return s;
}

namespace {

void check_operand(const Polynomial& a, const FabricConfig& cfg) {
  cfg.validate();
  if (!(a.params() == cfg.ring)) throw ConfigError("resident operand ring differs from the fabric ring");
}

}  // namespace

PmmFabric::PmmFabric(const Polynomial& a, const FabricConfig& cfg)
    : PmmFabric(a, cfg, (check_operand(a, cfg), plan_mapping(cfg.mode, ConvMatrix(a), cfg.xbar, cfg.array_budget))) {}

PmmFabric::PmmFabric(const Polynomial& a, const FabricConfig& cfg, const MappingPlan& plan)
    : a_(a), cfg_(cfg), reducer_(barrett_precompute(cfg.ring.q, cfg.ring.k)) {
  check_operand(a, cfg);
  const std::size_t n = cfg.ring.n;
  if (plan.mode != cfg.mode || plan.xbar.rows != cfg.xbar.rows || plan.xbar.cols != cfg.xbar.cols ||
      plan.weight_rows != n || plan.weight_cols != 2 * n - 1 || plan.weight_bits != cfg.ring.k ||
      plan.array_budget != cfg.array_budget) {
    throw ConfigError("mapping plan does not match the fabric configuration");
  }
  MappingPlan programmed = plan;
  programmed.xbar = cfg.xbar;  // noise settings come from the fabric config
  fabric_ = Fabric::load(programmed);
  limbs_ = LimbReducer::limbs_for_ring(n, cfg.ring.k);
}

StageCycles PmmFabric::stage_cycles() const {
  return cimpmm::stage_cycles(plan(), cfg_.timing, cfg_.ring.k, cfg_.ring.n);
}

EventCounters PmmFabric::predicted_counters() const {
  return predict_counters(plan(), cfg_.ring.k, cfg_.ring.n, limbs_);
}

FabricResult PmmFabric::simulate(const Polynomial& b, std::optional<std::uint64_t> noise_seed) const {
  if (!(b.params() == cfg_.ring)) throw ConfigError("input polynomial ring differs from the fabric ring");
  const bool noisy = noise_seed.has_value() && cfg_.xbar.noisy();
  std::optional<NoiseSource> noise;
  if (noisy) noise.emplace(*noise_seed);

  EventCounters counters;
  const auto pe_out = fabric_.pe_compute(b.coeffs(), cfg_.ring.k, noise ? &*noise : nullptr, counters);
  const auto wide = tile_accumulate(pe_out, plan().pe_shift, &counters);
  Polynomial result = tile_reduce(wide, cfg_.ring, reducer_, &counters);

  FabricResult out{std::move(result), schedule_pipeline(stage_cycles(), counters, 1), noisy, std::nullopt};
  if (noisy) out.error_stats = compare_to_oracle(out.result, pmm_reference(a_, b));
  return out;
}

FabricResult simulate_pmm(const PmmFabric& fabric, const Polynomial& b, std::optional<std::uint64_t> noise_seed) {
  return fabric.simulate(b, noise_seed);
}

}  // namespace cimpmm
