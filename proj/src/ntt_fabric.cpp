#include "cimpmm/ntt_fabric.hpp"

#include "cimpmm/error.hpp"
#include "cimpmm/poly.hpp"

namespace cimpmm {

WeightMatrix NttXbarPipeline::forward_matrix(const NttContext& ctx) {
  const std::size_t n = ctx.params.n;
  const u64 q = ctx.params.q;
  WeightMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const u64 w = pow_mod(ctx.omega, (i * j) % n, q);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mul_mod(ctx.psi_pows[i], w, q);
    }
  }
  return m;
}

WeightMatrix NttXbarPipeline::inverse_matrix(const NttContext& ctx) {
  const std::size_t n = ctx.params.n;
  const u64 q = ctx.params.q;
  const u64 omega_inv = inv_mod(ctx.omega, q);
  WeightMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const u64 w = pow_mod(omega_inv, (i * j) % n, q);
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          mul_mod(mul_mod(ctx.n_inv, ctx.psi_inv_pows[i], q), w, q);
    }
  }
  return m;
}

namespace {

Fabric load_dense(const WeightMatrix& w, unsigned k, const CrossbarConfig& xbar) {
  return Fabric::load(plan_bit_mapping(DenseWeights(w, k), xbar));
}

void check_degree(const NttContext& ctx) {
  if (ctx.params.n > 1024) throw UnsupportedParameters("NTT-on-crossbar supports degrees up to 1024");
}

}  // namespace

NttXbarPipeline::NttXbarPipeline(const NttContext& ctx, const CrossbarConfig& xbar, const StageTiming& timing)
    : ctx_((check_degree(ctx), ctx)),
      timing_(timing),
      forward_(load_dense(forward_matrix(ctx), ctx.params.k, xbar)),
      inverse_(load_dense(inverse_matrix(ctx), ctx.params.k, xbar)),
      reducer_(barrett_precompute(ctx.params.q, ctx.params.k)) {}

std::vector<u64> NttXbarPipeline::transform(const Fabric& f, std::span<const u64> input, NoiseSource* noise,
                                            EventCounters& counters) const {
  const auto pe_out = f.pe_compute(input, ctx_.params.k, noise, counters);
  const auto wide = tile_accumulate(pe_out, f.plan().pe_shift, &counters);
  const unsigned limbs = LimbReducer::limbs_for_ring(ctx_.params.n, ctx_.params.k);
  std::vector<u64> out(wide.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = reducer_.reduce(wide.vals[i], limbs);
  counters.reduction_ops += out.size() * limbs;
  return out;
}

FabricResult NttXbarPipeline::simulate(const Polynomial& a, const Polynomial& b,
                                       std::optional<std::uint64_t> noise_seed) const {
  if (!(a.params() == ctx_.params) || !(b.params() == ctx_.params)) {
    throw UnsupportedParameters("operands do not belong to the NTT context ring");
  }
  const bool noisy = noise_seed.has_value() && forward_.plan().xbar.noisy();
  std::optional<NoiseSource> noise;
  if (noisy) noise.emplace(*noise_seed);
  NoiseSource* ns = noise ? &*noise : nullptr;

  EventCounters counters;
  auto va = transform(forward_, a.coeffs(), ns, counters);
  const auto vb = transform(forward_, b.coeffs(), ns, counters);
  const u64 q = ctx_.params.q;
  for (std::size_t i = 0; i < va.size(); ++i) va[i] = mul_mod(va[i], vb[i], q);
  counters.reduction_ops += va.size();
  Polynomial result(ctx_.params, transform(inverse_, va, ns, counters));

  // Three VMM passes share one tile's stages.
  StageCycles per_pass = stage_cycles(forward_.plan(), timing_, ctx_.params.k, ctx_.params.n);
  for (std::size_t s = 0; s < kStageCount; ++s) {
    per_pass.busy[s] *= 3;
    per_pass.latency[s] *= 3;
  }
  FabricResult out{std::move(result), schedule_pipeline(per_pass, counters, 1), noisy, std::nullopt};
  if (noisy) out.error_stats = compare_to_oracle(out.result, pmm_reference(a, b));
  return out;
}

FabricResult simulate_pmm_ntt_on_xbar(const Polynomial& a, const Polynomial& b, const NttContext& ctx,
                                      const CrossbarConfig& xbar, std::optional<std::uint64_t> noise_seed) {
  return NttXbarPipeline(ctx, xbar).simulate(a, b, noise_seed);
}

}  // namespace cimpmm
