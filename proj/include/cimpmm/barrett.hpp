#pragma once

#include <vector>

#include "cimpmm/modarith.hpp"

namespace cimpmm {

/// Precomputed Barrett constants: m = 2k, mu = floor(2^m / q).
struct BarrettParams {
  u64 q = 0;
  unsigned k = 0;
  unsigned m = 0;
  u128 mu = 0;
};

/// Throws InvalidModulus when q is even or not strictly inside (2^(k-1), 2^k).
BarrettParams barrett_precompute(u64 q, unsigned k);

/// Shift-based reduction: t = x - q * ((x * mu) >> m), then at most two
/// conditional subtractions. Admissible inputs are x < 2^m; anything larger
/// raises RangeError.
u64 barrett_reduce(u128 x, const BarrettParams& bp);
u64 barrett_reduce(const WideUInt& x, const BarrettParams& bp);

/// Reduces a signed value of arbitrary width into [0, q) by splitting |v|
/// into m-bit limbs, reducing each limb with barrett_reduce and folding the
/// limbs with precomputed 2^(m*i) mod q factors.
class LimbReducer {
 public:
  explicit LimbReducer(const BarrettParams& bp);

  u64 reduce(const WideInt& v) const;
  /// Unit sized for `limbs` limbs; RangeError if v needs more.
  u64 reduce(const WideInt& v, unsigned limbs) const;

  /// Limbs that |v| occupies (at least one).
  static unsigned limb_count(const WideInt& v, unsigned m);
  /// Limbs that cover any folded coefficient of a degree-n product,
  /// |v| < 2 n (q - 1)^2.
  static unsigned limbs_for_ring(std::size_t n, unsigned k);

  const BarrettParams& params() const { return bp_; }

 private:
  BarrettParams bp_;
  std::vector<u64> limb_factors_;
};

}  // namespace cimpmm
