#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cimpmm/fabric.hpp"

namespace cimpmm {

enum class Component { Crossbar, Adc, ShiftAdder, AdderTree, Accumulator, Reduction, InputDriver };
inline constexpr std::size_t kComponentCount = 7;
inline constexpr std::array<Component, kComponentCount> kComponents = {
    Component::Crossbar,    Component::Adc,       Component::ShiftAdder, Component::AdderTree,
    Component::Accumulator, Component::Reduction, Component::InputDriver};

/// Key prefix used in cost files, e.g. "adc".
std::string to_string(Component c);

struct UnitCost {
  double area_um2 = 0.0;   // per instantiated unit
  double energy_pj = 0.0;  // per event
};

struct ComponentCosts {
  std::array<UnitCost, kComponentCount> units{};
  double frequency_mhz = 400.0;
  std::vector<std::string> provenance;  // one note per loaded key, in file order

  UnitCost& operator[](Component c) { return units[static_cast<std::size_t>(c)]; }
  const UnitCost& operator[](Component c) const { return units[static_cast<std::size_t>(c)]; }

  /// Throws ConfigError on negative values or a non-positive clock.
  void validate() const;
};

/// Parses the flat "key = value  # provenance" format. Every component
/// needs both area_um2 and energy_pj, plus clock.frequency_mhz; a missing
/// key, a missing provenance comment, or an unknown key is a ConfigError.
ComponentCosts parse_costs(const std::string& text);
ComponentCosts load_costs(const std::filesystem::path& path);
std::string format_costs(const ComponentCosts& costs);

/// Shipped calibration (see config/costs_default.txt).
ComponentCosts default_costs();

struct CostReport {
  std::size_t n = 0;
  unsigned k = 0;
  u64 q = 0;
  MappingMode mode = MappingMode::BitMapping;
  std::size_t arrays = 0;  // instantiated physical arrays
  std::uint64_t total_cycles = 0;
  std::uint64_t initiation_interval = 0;
  double frequency_mhz = 0.0;

  double area_mm2 = 0.0;
  double latency_us = 0.0;
  double energy_nj = 0.0;
  double throughput_kops = 0.0;
  double throughput_per_area = 0.0;  // KOP/s/mm^2; 0 when area is 0

  std::array<double, kComponentCount> units{};  // instantiated unit counts
  std::array<double, kComponentCount> area_um2{};
  std::array<double, kComponentCount> energy_pj{};
  std::array<double, kComponentCount> area_fraction{};    // all 0 when area is 0
  std::array<double, kComponentCount> energy_fraction{};  // all 0 when energy is 0

  Component dominant_area() const;
  Component dominant_energy() const;
};

/// Area from instantiated units, energy from the trace's event counters,
/// latency from its total cycles.
CostReport estimate(const MappingPlan& plan, const RingParams& ring, const PipelineTrace& trace,
                    const ComponentCosts& costs);

struct RatioEntry {
  std::string field;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> ratio;  // empty when b == 0 (flagged)
};

/// a / b for every scalar and per-component field. Throws ConfigError when
/// the reports are for different rings.
std::vector<RatioEntry> compare(const CostReport& a, const CostReport& b);
const RatioEntry& find_ratio(const std::vector<RatioEntry>& table, const std::string& field);

}  // namespace cimpmm
