#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cimpmm/barrett.hpp"
#include "cimpmm/mapping.hpp"
#include "cimpmm/ring.hpp"
#include "cimpmm/xbar.hpp"

namespace cimpmm {

/// Per-stage cycle constants. None of these are published; defaults place
/// n = 256, k = 16 at a 128-cycle initiation interval.
struct StageTiming {
  unsigned adc_conversion_cycles = 1;    // one column conversion on a shared ADC
  unsigned adder_tree_level_cycles = 1;  // per level of the PE adder tree
  unsigned shifter_cycles = 1;           // PE shift-accumulate / array shift-add
  unsigned accumulate_level_cycles = 1;  // per level of the tile accumulator
  unsigned reduction_batch_cycles = 4;   // per batch of C coefficients
};

struct FabricConfig {
  CrossbarConfig xbar;
  RingParams ring;
  MappingMode mode = MappingMode::BitMapping;
  std::optional<std::size_t> array_budget;
  double frequency_mhz = 400.0;
  StageTiming timing;

  void validate() const;
};

enum class Stage { PeCompute = 0, TileAccumulate = 1, TileReduce = 2 };
inline constexpr std::size_t kStageCount = 3;
std::string to_string(Stage s);

struct EventCounters {
  std::uint64_t adc_conversions = 0;
  std::uint64_t shift_add_ops = 0;
  std::uint64_t adder_tree_ops = 0;
  std::uint64_t accumulate_ops = 0;
  std::uint64_t reduction_ops = 0;
  std::uint64_t array_activations = 0;

  EventCounters& operator+=(const EventCounters& o);
  EventCounters scaled(std::uint64_t m) const;
  bool operator==(const EventCounters&) const = default;
};

/// Busy (occupancy) and latency cycles of each pipeline stage for one PMM.
struct StageCycles {
  std::array<std::uint64_t, kStageCount> busy{};
  std::array<std::uint64_t, kStageCount> latency{};

  std::uint64_t initiation_interval() const;
  std::uint64_t fill_latency() const;
};

struct StageInterval {
  std::size_t pmm = 0;
  Stage stage = Stage::PeCompute;
  std::uint64_t start = 0;
  std::uint64_t busy_end = 0;  // stage free for the next PMM
  std::uint64_t done = 0;      // result handed to the next stage
};

struct PipelineTrace {
  std::size_t pmm_count = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t initiation_interval = 0;
  std::uint64_t fill_latency = 0;
  StageCycles stages;
  std::vector<StageInterval> intervals;
  EventCounters counters;  // totals over all PMMs in the trace
};

/// Stage cycles implied by a plan; `input_bits` is the multiplier bitwidth.
StageCycles stage_cycles(const MappingPlan& plan, const StageTiming& timing, unsigned input_bits,
                         std::size_t output_coeffs);

/// Event counts one PMM performs on this plan (exact, value independent).
EventCounters predict_counters(const MappingPlan& plan, unsigned input_bits, std::size_t output_coeffs,
                               unsigned reduction_limbs);

/// Runs `m` identical PMMs through the three-stage pipeline cycle by cycle.
/// Throws ConfigError when m < 1.
PipelineTrace schedule_pipeline(const StageCycles& stages, const EventCounters& per_pmm, std::size_t m);

/// Structured text export: one record per stage interval plus a summary.
std::string export_trace(const PipelineTrace& trace);

/// Deterministic noise stream shared by every VMM of one simulation.
struct NoiseSource {
  explicit NoiseSource(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;
};

/// Weight-bit planes held by the physical arrays of a plan, programmed once.
class Fabric {
 public:
  /// Programs every physical array of the plan exactly once.
  static Fabric load(const MappingPlan& plan);

  const MappingPlan& plan() const { return plan_; }
  const std::vector<CrossbarArray>& arrays() const { return arrays_; }
  std::size_t program_count() const { return program_count_; }

  /// Per-PE partial vectors (length weight_cols) for one input bit-plane:
  /// every array of the PE runs its VMM on its input slice and the adder
  /// tree sums aligned columns across row tiles.
  std::vector<std::vector<u128>> pe_partials(const BitVector& input_bits, NoiseSource* noise,
                                             EventCounters& counters) const;

  /// All input bit-planes, MSB first, folded with acc = 2 acc + partial.
  std::vector<std::vector<WideAccumulator>> pe_compute(std::span<const u64> input, unsigned input_bits,
                                                       NoiseSource* noise, EventCounters& counters) const;

 private:
  MappingPlan plan_;
  std::vector<CrossbarArray> arrays_;
  std::size_t program_count_ = 0;
};

/// Sum over PEs of 2^shift_p * out_p, in exact integers.
WideVector tile_accumulate(const std::vector<std::vector<WideAccumulator>>& pe_outputs,
                           std::span<const unsigned> pe_shift, EventCounters* counters = nullptr);

/// Degree fold followed by limb-wise Barrett on every coefficient.
Polynomial tile_reduce(const WideVector& w, const RingParams& ring, const LimbReducer& reducer,
                       EventCounters* counters = nullptr);

struct ErrorStats {
  std::vector<u64> abs_error;  // centered |result - oracle| per coefficient
  double mean_abs_error = 0.0;
  u64 max_abs_error = 0;
  double error_rate = 0.0;  // fraction of wrong coefficients
};

ErrorStats compare_to_oracle(const Polynomial& result, const Polynomial& oracle);

struct FabricResult {
  Polynomial result;
  PipelineTrace trace;
  bool noisy = false;
  std::optional<ErrorStats> error_stats;
};

/// A tile holding resident operand A, ready to multiply.
class PmmFabric {
 public:
  /// Plans A with the configured mode and programs the arrays.
  PmmFabric(const Polynomial& a, const FabricConfig& cfg);
  /// Loads an existing plan (load_operand); throws when plan and config disagree.
  PmmFabric(const Polynomial& a, const FabricConfig& cfg, const MappingPlan& plan);

  const FabricConfig& config() const { return cfg_; }
  const Polynomial& operand() const { return a_; }
  const Fabric& fabric() const { return fabric_; }
  const MappingPlan& plan() const { return fabric_.plan(); }
  StageCycles stage_cycles() const;
  EventCounters predicted_counters() const;
  unsigned reduction_limbs() const { return limbs_; }

  /// Test hook: replaces the Barrett constants used by the reduction unit.
  void override_barrett(const BarrettParams& bp) { reducer_ = LimbReducer(bp); }

  /// Noise-free when `noise_seed` is empty or the crossbar has no noise.
  FabricResult simulate(const Polynomial& b, std::optional<std::uint64_t> noise_seed = std::nullopt) const;

 private:
  Polynomial a_;
  FabricConfig cfg_;
  Fabric fabric_;
  LimbReducer reducer_;
  unsigned limbs_ = 1;
};

FabricResult simulate_pmm(const PmmFabric& fabric, const Polynomial& b,
                          std::optional<std::uint64_t> noise_seed = std::nullopt);

}  // namespace cimpmm
