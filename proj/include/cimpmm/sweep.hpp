#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cimpmm/cost.hpp"

namespace cimpmm {

struct SweepPoint {
  std::size_t n = 256;
  unsigned k = 16;
  MappingMode mode = MappingMode::BitMapping;
  std::optional<std::size_t> array_budget;
};

struct SweepRow {
  SweepPoint point;
  u64 q = 0;
  CostReport report;
};

struct SweepGrid {
  std::vector<std::size_t> degrees{256};
  std::vector<unsigned> bitwidths{16};
  std::vector<MappingMode> modes{MappingMode::BitMapping};
  std::vector<std::optional<std::size_t>> budgets{std::nullopt};

  /// Cartesian product in (degree, bitwidth, mode, budget) order.
  std::vector<SweepPoint> points() const;
};

/// Plans one random operand (seeded per grid point) and costs a single PMM
/// from predicted counters and stage cycles; no VMM is simulated.
CostReport evaluate_point(const SweepPoint& p, const CrossbarConfig& xbar, const StageTiming& timing,
                          const ComponentCosts& costs, std::uint64_t seed, u64* modulus_out = nullptr);

/// One row per grid point, in grid order. Throws ConfigError on an empty grid.
std::vector<SweepRow> sweep(const SweepGrid& grid, const CrossbarConfig& xbar, const StageTiming& timing,
                            const ComponentCosts& costs, std::uint64_t seed);

inline constexpr const char* kSweepCsvHeader = "# cimpmm sweep csv v1";
inline constexpr const char* kSweepCsvColumns =
    "n,k,mode,arrays,cycles,area_mm2,latency_us,energy_nj,throughput_kops,tpa_kops_mm2";

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& config_echo = "");

}  // namespace cimpmm
