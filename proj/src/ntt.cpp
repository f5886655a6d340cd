#include "cimpmm/ntt.hpp"

#include <algorithm>
#include <string>

#include "cimpmm/error.hpp"

namespace cimpmm {

namespace {

// Smallest primitive root of unity of order `order` (a power of two) mod prime q.
u64 smallest_primitive_root(u64 order, u64 q) {
  if ((q - 1) % order != 0) {
    throw UnsupportedParameters("q - 1 is not divisible by " + std::to_string(order));
  }
  const u64 cofactor = (q - 1) / order;
  u64 root = 0;
  for (u64 g = 2; g < q; ++g) {
    const u64 x = pow_mod(g, cofactor, q);
    if (order == 1 || pow_mod(x, order / 2, q) != 1) {
      root = x;
      break;
    }
  }
  if (root == 0) throw UnsupportedParameters("no primitive root of the requested order");
  // Every primitive root of a power-of-two order is root^j for odd j.
  u64 best = root;
  const u64 root_sq = mul_mod(root, root, q);
  u64 cur = root;
  for (u64 j = 3; j < order; j += 2) {
    cur = mul_mod(cur, root_sq, q);
    best = std::min(best, cur);
  }
  return best;
}

void cyclic_transform(std::vector<u64>& x, const std::vector<u64>& tw, u64 q) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t t = 0; t < half; ++t) {
        const u64 u = x[start + t];
        const u64 v = mul_mod(x[start + t + half], tw[t * stride], q);
        x[start + t] = add_mod(u, v, q);
        x[start + t + half] = sub_mod(u, v, q);
      }
    }
  }
}

}  // namespace

NttContext NttContext::make(const RingParams& p) {
  if (!is_prime(p.q)) throw UnsupportedParameters("NTT requires a prime modulus");
  NttContext ctx;
  ctx.params = p;
  const u64 q = p.q;
  const std::size_t n = p.n;
  if (p.phi == ModulusPoly::XnPlus1) {
    ctx.psi = smallest_primitive_root(2 * n, q);
    ctx.omega = mul_mod(ctx.psi, ctx.psi, q);
  } else {
    ctx.psi = 1;
    ctx.omega = smallest_primitive_root(n, q);
  }
  if (pow_mod(ctx.omega, n, q) != 1 || pow_mod(ctx.omega, n / 2, q) == 1) {
    throw UnsupportedParameters("omega failed order verification");
  }
  ctx.n_inv = inv_mod(n % q, q);
  const u64 psi_inv = inv_mod(ctx.psi, q);
  const u64 omega_inv = inv_mod(ctx.omega, q);
  ctx.psi_pows.resize(n);
  ctx.psi_inv_pows.resize(n);
  ctx.twiddles.resize(n / 2);
  ctx.inv_twiddles.resize(n / 2);
  u64 a = 1, b = 1;
  for (std::size_t i = 0; i < n; ++i) {
    ctx.psi_pows[i] = a;
    ctx.psi_inv_pows[i] = b;
    a = mul_mod(a, ctx.psi, q);
    b = mul_mod(b, psi_inv, q);
  }
  a = 1;
  b = 1;
  for (std::size_t i = 0; i < n / 2; ++i) {
    ctx.twiddles[i] = a;
    ctx.inv_twiddles[i] = b;
    a = mul_mod(a, ctx.omega, q);
    b = mul_mod(b, omega_inv, q);
  }
  return ctx;
}

u64 smallest_ntt_prime(std::size_t n, ModulusPoly phi) {
  const u64 step = phi == ModulusPoly::XnPlus1 ? 2 * n : n;
  for (u64 q = step + 1;; q += step) {
    if (q > 2 && is_prime(q)) return q;
  }
}

NttContext NttContext::make(std::size_t n, u64 q, ModulusPoly phi) {
  RingParams p;
  try {
    p = RingParams::make(n, q, phi);
  } catch (const Error& e) {
    throw UnsupportedParameters(std::string("unsupported NTT ring: ") + e.what());
  }
  return make(p);
}

std::vector<u64> ntt_forward(const Polynomial& a, const NttContext& ctx) {
  if (!(a.params() == ctx.params)) throw DimensionMismatch("polynomial ring differs from NTT context");
  const u64 q = ctx.params.q;
  std::vector<u64> x(a.coeffs().begin(), a.coeffs().end());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mul_mod(x[i], ctx.psi_pows[i], q);
  cyclic_transform(x, ctx.twiddles, q);
  return x;
}

Polynomial ntt_inverse(std::span<const u64> v, const NttContext& ctx) {
  if (v.size() != ctx.params.n) throw DimensionMismatch("point-value vector must have n entries");
  const u64 q = ctx.params.q;
  std::vector<u64> x(v.begin(), v.end());
  cyclic_transform(x, ctx.inv_twiddles, q);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = mul_mod(mul_mod(x[i], ctx.n_inv, q), ctx.psi_inv_pows[i], q);
  }
  return Polynomial(ctx.params, std::move(x));
}

Polynomial pmm_via_ntt(const Polynomial& a, const Polynomial& b, const NttContext& ctx) {
  auto va = ntt_forward(a, ctx);
  const auto vb = ntt_forward(b, ctx);
  const u64 q = ctx.params.q;
  for (std::size_t i = 0; i < va.size(); ++i) va[i] = mul_mod(va[i], vb[i], q);
  return ntt_inverse(va, ctx);
}

}  // namespace cimpmm
