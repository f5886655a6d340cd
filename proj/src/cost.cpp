#include "cimpmm/cost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>

#include "cimpmm/error.hpp"

namespace cimpmm {

namespace {

// Kept in sync with config/costs_default.txt (a test compares the two).
constexpr const char* kDefaultCosts = R"(# cimpmm cost table v1
crossbar.area_um2 = 400        # calibrated, not measured: 128x128 1T1R array
crossbar.energy_pj = 25        # calibrated, not measured: per array activation
adc.area_um2 = 230             # calibrated, not measured: 8-bit shared SAR ADC
adc.energy_pj = 0.85           # calibrated, not measured: per column conversion
shift_adder.area_um2 = 550     # calibrated, not measured: per shift-add unit
shift_adder.energy_pj = 0.2    # calibrated, not measured: per shift-add op
adder_tree.area_um2 = 150      # calibrated, not measured: per tree node
adder_tree.energy_pj = 0.1     # calibrated, not measured: per node op
accumulator.area_um2 = 5000    # calibrated, not measured: tile accumulator
accumulator.energy_pj = 0.1    # calibrated, not measured: per accumulate op
reduction.area_um2 = 20000     # calibrated, not measured: reduction unit
reduction.energy_pj = 0.5      # calibrated, not measured: per limb reduction
input_driver.area_um2 = 600    # calibrated, not measured: per-array row drivers
input_driver.energy_pj = 1     # calibrated, not measured: per array activation
clock.frequency_mhz = 400      # nominal operating point
)";

const std::array<std::string, kComponentCount> kNames = {
    "crossbar", "adc", "shift_adder", "adder_tree", "accumulator", "reduction", "input_driver"};

double parse_number(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cost entry '" + key + "' has a non-numeric value '" + s + "'");
  }
}

std::size_t argmax(const std::array<double, kComponentCount>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void fractions(const std::array<double, kComponentCount>& v, std::array<double, kComponentCount>& out) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (std::size_t i = 0; i < kComponentCount; ++i) out[i] = total > 0 ? v[i] / total : 0.0;
}

}  // namespace

std::string to_string(Component c) { return kNames[static_cast<std::size_t>(c)]; }

void ComponentCosts::validate() const {
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    if (units[i].area_um2 < 0 || units[i].energy_pj < 0) {
      throw ConfigError("negative cost for component '" + kNames[i] + "'");
    }
  }
  if (!(frequency_mhz > 0)) throw ConfigError("clock.frequency_mhz must be positive");
}

ComponentCosts parse_costs(const std::string& text) {
  std::map<std::string, double> values;
  ComponentCosts costs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    std::string note;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      body = line.substr(0, hash);
      note = line.substr(hash + 1);
    }
    boost::algorithm::trim(body);
    boost::algorithm::trim(note);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("cost file line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = body.substr(0, eq);
    std::string value = body.substr(eq + 1);
    boost::algorithm::trim(key);
    boost::algorithm::trim(value);
    if (note.empty()) throw ConfigError("cost entry '" + key + "' lacks a provenance comment");
    if (values.count(key)) throw ConfigError("duplicate cost entry '" + key + "'");
    values[key] = parse_number(key, value);
    costs.provenance.push_back(key + ": " + note);
  }

  auto take = [&](const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing cost entry '" + key + "'");
    const double v = it->second;
    values.erase(it);
    return v;
  };
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    costs.units[i].area_um2 = take(kNames[i] + ".area_um2");
    costs.units[i].energy_pj = take(kNames[i] + ".energy_pj");
  }
  costs.frequency_mhz = take("clock.frequency_mhz");
  if (!values.empty()) throw ConfigError("unknown cost entry '" + values.begin()->first + "'");
  costs.validate();
  return costs;
}

ComponentCosts load_costs(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open cost file '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_costs(ss.str());
}

std::string format_costs(const ComponentCosts& costs) {
  std::ostringstream os;
  os << "# cimpmm cost table v1\n";
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    os << kNames[i] << ".area_um2 = " << costs.units[i].area_um2 << "  # written by format_costs\n";
    os << kNames[i] << ".energy_pj = " << costs.units[i].energy_pj << "  # written by format_costs\n";
  }
  os << "clock.frequency_mhz = " << costs.frequency_mhz << "  # written by format_costs\n";
  return os.str();
}

ComponentCosts default_costs() {
  static const ComponentCosts costs = parse_costs(kDefaultCosts);
  return costs;
}

Component CostReport::dominant_area() const { return kComponents[argmax(area_um2)]; }
Component CostReport::dominant_energy() const { return kComponents[argmax(energy_pj)]; }

CostReport estimate(const MappingPlan& plan, const RingParams& ring, const PipelineTrace& trace,
                    const ComponentCosts& costs) {
  costs.validate();
  if (trace.initiation_interval == 0) throw ConfigError("trace has no initiation interval");
  CostReport r;
  r.n = ring.n;
  r.k = ring.k;
  r.q = ring.q;
  r.mode = plan.mode;
  r.arrays = plan.instantiated_arrays();
  r.total_cycles = trace.total_cycles;
  r.initiation_interval = trace.initiation_interval;
  r.frequency_mhz = costs.frequency_mhz;

  auto idx = [](Component c) { return static_cast<std::size_t>(c); };
  const double arrays = static_cast<double>(r.arrays);
  const std::array<double, kComponentCount> units = {
      arrays,
      arrays * static_cast<double>(plan.xbar.adcs_per_array()),
      static_cast<double>(plan.shift_adder_count),
      static_cast<double>(plan.adder_tree_nodes),
      static_cast<double>(plan.accumulator_count),
      1.0,
      arrays,
  };
  const auto& ev = trace.counters;
  const std::array<double, kComponentCount> events = {
      static_cast<double>(ev.array_activations), static_cast<double>(ev.adc_conversions),
      static_cast<double>(ev.shift_add_ops),     static_cast<double>(ev.adder_tree_ops),
      static_cast<double>(ev.accumulate_ops),    static_cast<double>(ev.reduction_ops),
      static_cast<double>(ev.array_activations),
  };
  r.units = units;
  for (const Component c : kComponents) {
    r.area_um2[idx(c)] = units[idx(c)] * costs[c].area_um2;
    r.energy_pj[idx(c)] = events[idx(c)] * costs[c].energy_pj;
  }
  r.area_mm2 = std::accumulate(r.area_um2.begin(), r.area_um2.end(), 0.0) * 1e-6;
  r.energy_nj = std::accumulate(r.energy_pj.begin(), r.energy_pj.end(), 0.0) * 1e-3;
  fractions(r.area_um2, r.area_fraction);
  fractions(r.energy_pj, r.energy_fraction);

  r.latency_us = static_cast<double>(trace.total_cycles) / costs.frequency_mhz;
  r.throughput_kops = 1e3 * costs.frequency_mhz / static_cast<double>(trace.initiation_interval);
  r.throughput_per_area = r.area_mm2 > 0 ? r.throughput_kops / r.area_mm2 : 0.0;
  return r;
}

std::vector<RatioEntry> compare(const CostReport& a, const CostReport& b) {
  if (a.n != b.n || a.k != b.k || a.q != b.q) {
    throw ConfigError("compare needs reports for the same ring");
  }
  std::vector<RatioEntry> t;
  auto add = [&](std::string field, double x, double y) {
    RatioEntry e{std::move(field), x, y, std::nullopt};
    if (y != 0) e.ratio = x / y;
    t.push_back(std::move(e));
  };
  add("arrays", static_cast<double>(a.arrays), static_cast<double>(b.arrays));
  add("cycles", static_cast<double>(a.total_cycles), static_cast<double>(b.total_cycles));
  add("initiation_interval", static_cast<double>(a.initiation_interval), static_cast<double>(b.initiation_interval));
  add("area_mm2", a.area_mm2, b.area_mm2);
  add("latency_us", a.latency_us, b.latency_us);
  add("energy_nj", a.energy_nj, b.energy_nj);
  add("throughput_kops", a.throughput_kops, b.throughput_kops);
  add("throughput_per_area", a.throughput_per_area, b.throughput_per_area);
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    add(kNames[i] + ".area_um2", a.area_um2[i], b.area_um2[i]);
    add(kNames[i] + ".energy_pj", a.energy_pj[i], b.energy_pj[i]);
  }
  return t;
}

const RatioEntry& find_ratio(const std::vector<RatioEntry>& table, const std::string& field) {
  for (const auto& e : table) {
    if (e.field == field) return e;
  }
  throw ConfigError("no ratio field '" + field + "'");
}

}  // namespace cimpmm
