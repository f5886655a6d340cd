#pragma once

#include <span>
#include <vector>

#include "cimpmm/ring.hpp"

namespace cimpmm {

/// Roots of unity and power tables for a length-n NTT over Z_q.
///
/// For x^n + 1 the transform is negacyclic: inputs are premultiplied by
/// psi^i where psi is a primitive 2n-th root with psi^2 = omega. For x^n - 1
/// psi is 1. Roots are the smallest qualifying residues, so contexts are
/// reproducible.
struct NttContext {
  RingParams params;
  u64 omega = 0;
  u64 psi = 1;
  u64 n_inv = 0;
  std::vector<u64> psi_pows;
  std::vector<u64> psi_inv_pows;
  std::vector<u64> twiddles;      // omega^i, i < n/2
  std::vector<u64> inv_twiddles;  // omega^-i, i < n/2

  /// Throws UnsupportedParameters when q is not prime or lacks the roots.
  static NttContext make(const RingParams& p);
  /// Same, from raw values; invalid rings are reported as unsupported too.
  static NttContext make(std::size_t n, u64 q, ModulusPoly phi = ModulusPoly::XnPlus1);
};

/// Point-value form in natural order: v[j] = sum_i a[i] psi^i omega^(i j).
std::vector<u64> ntt_forward(const Polynomial& a, const NttContext& ctx);
Polynomial ntt_inverse(std::span<const u64> v, const NttContext& ctx);

/// Smallest prime q = 1 (mod 2n) (mod n for x^n - 1) with q > 2.
u64 smallest_ntt_prime(std::size_t n, ModulusPoly phi = ModulusPoly::XnPlus1);

Polynomial pmm_via_ntt(const Polynomial& a, const Polynomial& b, const NttContext& ctx);

}  // namespace cimpmm
