#pragma once

#include <cstdint>
#include <optional>

#include "cimpmm/fabric.hpp"
#include "cimpmm/ntt.hpp"

namespace cimpmm {

/// NTT-based PMM on crossbars: the forward and inverse transforms run as
/// bit-sliced VMMs against stored n x n twiddle matrices (one extra set of
/// arrays per transform), with digital reduction after every VMM and a
/// digital element-wise product in between.
class NttXbarPipeline {
 public:
  /// Throws UnsupportedParameters for degrees above 1024 (dense twiddles).
  NttXbarPipeline(const NttContext& ctx, const CrossbarConfig& xbar, const StageTiming& timing = {});

  const NttContext& context() const { return ctx_; }
  const Fabric& forward() const { return forward_; }
  const Fabric& inverse() const { return inverse_; }

  /// Forward twiddles: F(i, j) = psi^i omega^(i j); inverse:
  /// G(j, i) = n^-1 psi^-i omega^-(i j).
  static WeightMatrix forward_matrix(const NttContext& ctx);
  static WeightMatrix inverse_matrix(const NttContext& ctx);

  FabricResult simulate(const Polynomial& a, const Polynomial& b,
                        std::optional<std::uint64_t> noise_seed = std::nullopt) const;

 private:
  std::vector<u64> transform(const Fabric& f, std::span<const u64> input, NoiseSource* noise,
                             EventCounters& counters) const;

  NttContext ctx_;
  StageTiming timing_;
  Fabric forward_;
  Fabric inverse_;
  LimbReducer reducer_;
};

FabricResult simulate_pmm_ntt_on_xbar(const Polynomial& a, const Polynomial& b, const NttContext& ctx,
                                      const CrossbarConfig& xbar,
                                      std::optional<std::uint64_t> noise_seed = std::nullopt);

}  // namespace cimpmm
