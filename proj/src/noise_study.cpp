#include "cimpmm/noise_study.hpp"

#include <cmath>
#include <random>

#include "cimpmm/error.hpp"
#include "cimpmm/ntt_fabric.hpp"
#include "cimpmm/poly.hpp"

namespace cimpmm {

u64 noise_study_modulus(std::size_t n) { return smallest_ntt_prime(n); }

std::vector<NoiseSummary> run_noise_study(const NoiseStudyConfig& cfg) {
  if (cfg.seeds < 2) throw ConfigError("noise study needs at least two seeds");
  std::vector<NoiseSummary> out;
  for (const double sigma : cfg.sigmas) {
    for (const std::size_t n : cfg.degrees) {
      NoiseSummary s;
      s.sigma = sigma;
      s.n = n;
      s.q = noise_study_modulus(n);
      const auto ring = RingParams::make(n, s.q);
      const auto ctx = NttContext::make(ring);

      FabricConfig fc;
      fc.xbar = cfg.xbar;
      fc.xbar.noise_sigma = sigma;
      fc.xbar.flip_prob = cfg.flip_prob;
      fc.ring = ring;
      fc.mode = MappingMode::BitMapping;
      const NttXbarPipeline ntt(ctx, fc.xbar);

      for (std::size_t i = 0; i < cfg.seeds; ++i) {
        const std::uint64_t seed = cfg.base_seed + i;
        std::mt19937_64 rng(seed);
        const auto a = random_polynomial(ring, rng);
        const auto b = random_polynomial(ring, rng);
        const auto conv = PmmFabric(a, fc).simulate(b, seed);
        const auto via_ntt = ntt.simulate(a, b, seed);
        NoisePair p{seed, 0.0, 0.0};
        if (conv.error_stats) p.conv_error = conv.error_stats->mean_abs_error;
        if (via_ntt.error_stats) p.ntt_error = via_ntt.error_stats->mean_abs_error;
        s.pairs.push_back(p);
      }

      const double m = static_cast<double>(s.pairs.size());
      double var = 0.0;
      for (const auto& p : s.pairs) {
        s.mean_conv += p.conv_error / m;
        s.mean_ntt += p.ntt_error / m;
      }
      s.mean_diff = s.mean_ntt - s.mean_conv;
      for (const auto& p : s.pairs) {
        const double d = p.ntt_error - p.conv_error - s.mean_diff;
        var += d * d / (m - 1);
      }
      s.se_diff = std::sqrt(var / m);
      s.ordering_holds = s.mean_diff + 1.645 * s.se_diff >= 0;
      s.strictly_greater = s.mean_diff - 1.645 * s.se_diff > 0;
      out.push_back(std::move(s));
    }
  }
  return out;
}

double ordering_fraction(const std::vector<NoiseSummary>& s) {
  if (s.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& x : s) ok += x.ordering_holds ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(s.size());
}

}  // namespace cimpmm
