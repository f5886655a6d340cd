#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "cimpmm/error.hpp"
#include "cimpmm/fabric.hpp"

namespace cimpmm {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::PeCompute:
      return "pe_compute";
    case Stage::TileAccumulate:
      return "tile_accumulate";
    case Stage::TileReduce:
      return "tile_reduce";
  }
  return "unknown";
}

EventCounters& EventCounters::operator+=(const EventCounters& o) {
  adc_conversions += o.adc_conversions;
  shift_add_ops += o.shift_add_ops;
  adder_tree_ops += o.adder_tree_ops;
  accumulate_ops += o.accumulate_ops;
  reduction_ops += o.reduction_ops;
  array_activations += o.array_activations;
  return *this;
}

EventCounters EventCounters::scaled(std::uint64_t m) const {
  EventCounters c = *this;
  c.adc_conversions *= m;
  c.shift_add_ops *= m;
  c.adder_tree_ops *= m;
  c.accumulate_ops *= m;
  c.reduction_ops *= m;
  c.array_activations *= m;
  return c;
}

std::uint64_t StageCycles::initiation_interval() const { return *std::max_element(busy.begin(), busy.end()); }

std::uint64_t StageCycles::fill_latency() const { return std::accumulate(latency.begin(), latency.end(), std::uint64_t{0}); }

namespace {

std::uint64_t ceil_log2(std::uint64_t x) { return x <= 1 ? 0 : std::bit_width(x - 1); }

}  // namespace

StageCycles stage_cycles(const MappingPlan& plan, const StageTiming& timing, unsigned input_bits,
                         std::size_t output_coeffs) {
  StageCycles s;
  const std::uint64_t per_vmm = plan.xbar.cols_per_adc * timing.adc_conversion_cycles;
  const std::uint64_t array_shift = plan.mode == MappingMode::Conventional ? timing.shifter_cycles : 0;
  const auto pe = static_cast<std::size_t>(Stage::PeCompute);
  const auto acc = static_cast<std::size_t>(Stage::TileAccumulate);
  const auto red = static_cast<std::size_t>(Stage::TileReduce);

  s.busy[pe] = std::uint64_t{input_bits} * plan.time_multiplex * (per_vmm + array_shift);
  s.latency[pe] = s.busy[pe] + ceil_log2(plan.arrays_per_pe()) * timing.adder_tree_level_cycles + timing.shifter_cycles;

  s.busy[acc] = std::max<std::uint64_t>(1, ceil_log2(plan.pe_count)) * timing.accumulate_level_cycles;
  s.latency[acc] = s.busy[acc];

  const std::uint64_t batches = (output_coeffs + plan.xbar.cols - 1) / plan.xbar.cols;
  s.busy[red] = std::max<std::uint64_t>(1, batches) * timing.reduction_batch_cycles;
  s.latency[red] = s.busy[red];
  return s;
}

EventCounters predict_counters(const MappingPlan& plan, unsigned input_bits, std::size_t output_coeffs,
                               unsigned reduction_limbs) {
  EventCounters c;
  const std::uint64_t t = input_bits;
  const std::uint64_t C = plan.xbar.cols;
  c.array_activations = plan.logical_count() * t;
  c.adc_conversions = plan.logical_count() * C * t;
  c.adder_tree_ops = plan.adder_tree_nodes * t;
  if (plan.mode == MappingMode::BitMapping) {
    c.shift_add_ops = plan.pe_count * t * plan.weight_cols;
  } else {
    c.shift_add_ops = plan.shift_adder_count * t * std::min<std::uint64_t>(plan.weight_bits, C);
  }
  c.accumulate_ops = plan.pe_count * plan.weight_cols;
  c.reduction_ops = output_coeffs * reduction_limbs;
  return c;
}

PipelineTrace schedule_pipeline(const StageCycles& stages, const EventCounters& per_pmm, std::size_t m) {
  if (m < 1) throw ConfigError("a pipeline batch needs at least one PMM");
  PipelineTrace trace;
  trace.pmm_count = m;
  trace.stages = stages;
  trace.initiation_interval = stages.initiation_interval();
  trace.fill_latency = stages.fill_latency();
  trace.counters = per_pmm.scaled(m);
  trace.intervals.reserve(m * kStageCount);

  // A stage accepts PMM i once PMM i has left the previous stage and the
  // stage has finished its busy window for PMM i - 1.
  std::array<std::uint64_t, kStageCount> stage_free{};
  std::uint64_t last_done = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t ready = 0;
    for (std::size_t s = 0; s < kStageCount; ++s) {
      const std::uint64_t start = std::max(ready, stage_free[s]);
      StageInterval iv{i, static_cast<Stage>(s), start, start + stages.busy[s], start + stages.latency[s]};
      stage_free[s] = iv.busy_end;
      ready = iv.done;
      trace.intervals.push_back(iv);
    }
    last_done = ready;
  }
  trace.total_cycles = last_done;
  return trace;
}

std::string export_trace(const PipelineTrace& trace) {
  std::ostringstream os;
  os << "# pipeline trace v1\n";
  for (const auto& iv : trace.intervals) {
    os << "event pmm=" << iv.pmm << " stage=" << to_string(iv.stage) << " start=" << iv.start
       << " busy_end=" << iv.busy_end << " done=" << iv.done << "\n";
  }
  const auto& c = trace.counters;
  os << "summary pmms=" << trace.pmm_count << " total_cycles=" << trace.total_cycles
     << " initiation_interval=" << trace.initiation_interval << " fill_latency=" << trace.fill_latency
     << " adc_conversions=" << c.adc_conversions << " shift_add_ops=" << c.shift_add_ops
     << " adder_tree_ops=" << c.adder_tree_ops << " accumulate_ops=" << c.accumulate_ops
     << " reduction_ops=" << c.reduction_ops << " array_activations=" << c.array_activations << "\n";
  return os.str();
}

}  // namespace cimpmm
