#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cimpmm/cost.hpp"
#include "cimpmm/fabric.hpp"

namespace cimpmm::cli {

enum class OutputFormat { Table, Csv, Json };

/// Every knob of every subcommand. Serialized in full into each output so a
/// run can be replayed from its echo.
struct RunConfig {
  std::size_t degree = 256;
  unsigned bitwidth = 16;
  std::optional<u64> modulus;  // default_modulus(degree, bitwidth) when empty
  std::string phi = "x^n+1";

  std::size_t rows = 128;
  std::size_t cols = 128;
  unsigned adc_bits = 8;
  std::size_t cols_per_adc = 8;

  std::string mode = "bit-mapping";  // dump-plan and compare also take "both"
  std::optional<std::size_t> arrays;
  double sigma = 0.0;
  double flip_prob = 0.0;
  std::uint64_t seed = 1;
  std::size_t pmms = 1;

  // verify
  std::size_t pairs = 20;
  // verify and sweep grids; empty means the command's own default
  std::vector<std::size_t> degrees;
  std::vector<unsigned> bitwidths;
  std::vector<std::size_t> budgets;
  // noise-study
  std::vector<double> sigmas{0.25, 0.5, 1.0};
  std::vector<std::size_t> noise_degrees{8, 16, 32};
  std::size_t seeds = 100;
  // dump-plan operand: random | zero | toy
  std::string operand = "random";

  std::string costs;  // cost table path, built-in calibration when empty
  std::string out;
  std::string format = "table";
};

void to_json(nlohmann::ordered_json& j, const RunConfig& c);
/// Missing keys keep their current value; unknown keys are a ConfigError.
void merge_json(RunConfig& c, const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Checks every field against the module invariants. Throws ConfigError
/// (or the ring's own error types) on the first violation.
void validate(const RunConfig& c);

OutputFormat output_format(const RunConfig& c);
RingParams ring_of(const RunConfig& c);
CrossbarConfig crossbar_of(const RunConfig& c);
ComponentCosts costs_of(const RunConfig& c);
std::vector<MappingMode> modes_of(const RunConfig& c);

}  // namespace cimpmm::cli
