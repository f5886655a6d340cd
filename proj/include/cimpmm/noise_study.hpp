#pragma once

#include <cstdint>
#include <vector>

#include "cimpmm/xbar.hpp"

namespace cimpmm {

/// Paired Monte-Carlo comparison of the Conv1D fabric and the NTT-on-crossbar
/// path under identical crossbar noise. Each seed draws one (A, B) pair and
/// one noise stream shared by both paths.
struct NoiseStudyConfig {
  std::vector<double> sigmas{0.25, 0.5, 1.0};
  std::vector<std::size_t> degrees{8, 16, 32};
  std::size_t seeds = 100;
  std::uint64_t base_seed = 1;
  double flip_prob = 0.0;
  CrossbarConfig xbar;  // noise_sigma is overwritten per configuration
};

struct NoisePair {
  std::uint64_t seed = 0;
  double conv_error = 0.0;  // mean centered |error| over coefficients
  double ntt_error = 0.0;
};

struct NoiseSummary {
  double sigma = 0.0;
  std::size_t n = 0;
  u64 q = 0;
  std::vector<NoisePair> pairs;
  double mean_conv = 0.0;
  double mean_ntt = 0.0;
  double mean_diff = 0.0;  // ntt - conv
  double se_diff = 0.0;
  // One-sided 95% test: ordering holds unless NTT error is significantly
  // below Conv1D error (mean_diff + 1.645 se < 0).
  bool ordering_holds = false;
  // NTT error significantly above Conv1D error (mean_diff - 1.645 se > 0).
  bool strictly_greater = false;
};

/// Modulus used for degree n: the smallest NTT-friendly prime.
u64 noise_study_modulus(std::size_t n);

std::vector<NoiseSummary> run_noise_study(const NoiseStudyConfig& cfg);

/// Fraction of configurations whose ordering holds.
double ordering_fraction(const std::vector<NoiseSummary>& s);

}  // namespace cimpmm
