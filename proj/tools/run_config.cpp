#include "run_config.hpp"

#include <fstream>
#include <set>

#include "cimpmm/error.hpp"

namespace cimpmm::cli {

using nlohmann::json;
using nlohmann::ordered_json;

void to_json(ordered_json& j, const RunConfig& c) {
  j = ordered_json{
      {"degree", c.degree},
      {"bitwidth", c.bitwidth},
      {"modulus", c.modulus ? json(*c.modulus) : json(nullptr)},
      {"phi", c.phi},
      {"rows", c.rows},
      {"cols", c.cols},
      {"adc_bits", c.adc_bits},
      {"cols_per_adc", c.cols_per_adc},
      {"mode", c.mode},
      {"arrays", c.arrays ? json(*c.arrays) : json(nullptr)},
      {"sigma", c.sigma},
      {"flip_prob", c.flip_prob},
      {"seed", c.seed},
      {"pmms", c.pmms},
      {"pairs", c.pairs},
      {"degrees", c.degrees},
      {"bitwidths", c.bitwidths},
      {"budgets", c.budgets},
      {"sigmas", c.sigmas},
      {"noise_degrees", c.noise_degrees},
      {"seeds", c.seeds},
      {"operand", c.operand},
      {"costs", c.costs},
      {"out", c.out},
      {"format", c.format},
  };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) j.at(key).get_to(dst);
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    dst.reset();
  } else {
    dst = j.at(key).get<T>();
  }
}

}  // namespace

void merge_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "degree", "bitwidth", "modulus", "phi",   "rows",     "cols",          "adc_bits", "cols_per_adc",
      "mode",   "arrays",   "sigma",   "flip_prob", "seed", "pmms",          "pairs",    "degrees",
      "bitwidths", "budgets", "sigmas", "noise_degrees", "seeds", "operand", "costs",    "out",
      "format"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    read(j, "degree", c.degree);
    read(j, "bitwidth", c.bitwidth);
    read_optional(j, "modulus", c.modulus);
    read(j, "phi", c.phi);
    read(j, "rows", c.rows);
    read(j, "cols", c.cols);
    read(j, "adc_bits", c.adc_bits);
    read(j, "cols_per_adc", c.cols_per_adc);
    read(j, "mode", c.mode);
    read_optional(j, "arrays", c.arrays);
    read(j, "sigma", c.sigma);
    read(j, "flip_prob", c.flip_prob);
    read(j, "seed", c.seed);
    read(j, "pmms", c.pmms);
    read(j, "pairs", c.pairs);
    read(j, "degrees", c.degrees);
    read(j, "bitwidths", c.bitwidths);
    read(j, "budgets", c.budgets);
    read(j, "sigmas", c.sigmas);
    read(j, "noise_degrees", c.noise_degrees);
    read(j, "seeds", c.seeds);
    read(j, "operand", c.operand);
    read(j, "costs", c.costs);
    read(j, "out", c.out);
    read(j, "format", c.format);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c;
  merge_json(c, j);
  return c;
}

OutputFormat output_format(const RunConfig& c) {
  if (c.format == "table") return OutputFormat::Table;
  if (c.format == "csv") return OutputFormat::Csv;
  if (c.format == "json") return OutputFormat::Json;
  throw ConfigError("format must be table, csv or json");
}

RingParams ring_of(const RunConfig& c) {
  const auto phi = modulus_poly_from_string(c.phi);
  if (c.modulus) return RingParams::make(c.degree, *c.modulus, phi);
  if (c.bitwidth < 2 || c.bitwidth > 64) throw ConfigError("bitwidth must be in [2, 64]");
  // Validate n before searching for a modulus.
  RingParams::make(c.degree, 3, phi);
  return RingParams::make(c.degree, default_modulus(c.degree, c.bitwidth), phi);
}

CrossbarConfig crossbar_of(const RunConfig& c) {
  CrossbarConfig x;
  x.rows = c.rows;
  x.cols = c.cols;
  x.adc_bits = c.adc_bits;
  x.cols_per_adc = c.cols_per_adc;
  x.noise_sigma = c.sigma;
  x.flip_prob = c.flip_prob;
  x.validate();
  return x;
}

ComponentCosts costs_of(const RunConfig& c) { return c.costs.empty() ? default_costs() : load_costs(c.costs); }

std::vector<MappingMode> modes_of(const RunConfig& c) {
  if (c.mode == "both") return {MappingMode::BitMapping, MappingMode::Conventional};
  return {mapping_mode_from_string(c.mode)};
}

void validate(const RunConfig& c) {
  ring_of(c);
  crossbar_of(c);
  modes_of(c);
  output_format(c);
  if (c.arrays && *c.arrays == 0) throw ConfigError("arrays must be at least 1");
  if (c.pmms == 0) throw ConfigError("pmms must be at least 1");
  if (c.pairs == 0) throw ConfigError("pairs must be at least 1");
  if (c.seeds < 2) throw ConfigError("seeds must be at least 2");
  for (const auto b : c.budgets) {
    if (b == 0) throw ConfigError("budgets must be positive");
  }
  for (const auto s : c.sigmas) {
    if (s < 0) throw ConfigError("sigmas must be non-negative");
  }
  for (const auto n : c.degrees) RingParams::make(n, 3);
  for (const auto n : c.noise_degrees) RingParams::make(n, 3);
  for (const auto k : c.bitwidths) {
    if (k < 2 || k > 64) throw ConfigError("bitwidths must be in [2, 64]");
  }
  if (c.operand != "random" && c.operand != "zero" && c.operand != "toy") {
    throw ConfigError("operand must be random, zero or toy");
  }
  if (!c.costs.empty()) load_costs(c.costs);
}

}  // namespace cimpmm::cli
