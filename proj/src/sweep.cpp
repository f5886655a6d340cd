#include "cimpmm/sweep.hpp"

#include <random>
#include <sstream>

#include "cimpmm/error.hpp"
#include "cimpmm/poly.hpp"

namespace cimpmm {

std::vector<SweepPoint> SweepGrid::points() const {
  std::vector<SweepPoint> out;
  for (const auto n : degrees) {
    for (const auto k : bitwidths) {
      for (const auto mode : modes) {
        for (const auto& budget : budgets) out.push_back({n, k, mode, budget});
      }
    }
  }
  return out;
}

CostReport evaluate_point(const SweepPoint& p, const CrossbarConfig& xbar, const StageTiming& timing,
                          const ComponentCosts& costs, std::uint64_t seed, u64* modulus_out) {
  const auto ring = RingParams::make(p.n, default_modulus(p.n, p.k));
  // The operand depends on (seed, n, k) only, so modes and budgets at one
  // ring point see the same polynomial.
  std::seed_seq seq{seed, static_cast<std::uint64_t>(p.n), static_cast<std::uint64_t>(p.k)};
  std::mt19937_64 rng(seq);
  const auto a = random_polynomial(ring, rng);
  const auto plan = p.mode == MappingMode::BitMapping ? plan_bit_mapping(a, xbar, p.array_budget)
                                                      : plan_conventional(a, xbar, p.array_budget);
  const auto stages = stage_cycles(plan, timing, ring.k, ring.n);
  const auto counters = predict_counters(plan, ring.k, ring.n, LimbReducer::limbs_for_ring(ring.n, ring.k));
  const auto trace = schedule_pipeline(stages, counters, 1);
  if (modulus_out) *modulus_out = ring.q;
  return estimate(plan, ring, trace, costs);
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const CrossbarConfig& xbar, const StageTiming& timing,
                            const ComponentCosts& costs, std::uint64_t seed) {
  const auto points = grid.points();
  if (points.empty()) throw ConfigError("sweep grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    SweepRow row{p, 0, {}};
    row.report = evaluate_point(p, xbar, timing, costs, seed, &row.q);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& config_echo) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  if (!config_echo.empty()) {
    std::istringstream in(config_echo);
    for (std::string line; std::getline(in, line);) os << "# config " << line << '\n';
  }
  os << kSweepCsvColumns << '\n';
  os.precision(10);
  for (const auto& r : rows) {
    const auto& c = r.report;
    os << r.point.n << ',' << r.point.k << ',' << to_string(r.point.mode) << ',' << c.arrays << ','
       << c.total_cycles << ',' << c.area_mm2 << ',' << c.latency_us << ',' << c.energy_nj << ','
       << c.throughput_kops << ',' << c.throughput_per_area << '\n';
  }
  return os.str();
}

}  // namespace cimpmm
