#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace cimpmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitUsage = 2;

struct VerifyTally {
  std::string check;
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::string first_failure;
};

/// Names of every oracle-equivalence check verify runs, in report order.
const std::vector<std::string>& verify_check_names();

/// `corrupt_barrett_mu` perturbs mu in every Barrett instance (fault injection).
std::vector<VerifyTally> run_verify_checks(const RunConfig& c, bool corrupt_barrett_mu = false);

int cmd_verify(const RunConfig& c, std::ostream& out, bool corrupt_barrett_mu = false);
int cmd_run(const RunConfig& c, std::ostream& out);
int cmd_sweep(const RunConfig& c, std::ostream& out);
int cmd_compare_mapping(const RunConfig& c, std::ostream& out);
int cmd_noise_study(const RunConfig& c, std::ostream& out);
int cmd_dump_plan(const RunConfig& c, std::ostream& out);

/// 4 x 4 matrix of 2-bit weights used by `dump-plan --operand toy`.
WeightMatrix toy_weights();

}  // namespace cimpmm::cli
