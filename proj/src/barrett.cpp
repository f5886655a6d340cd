#include "cimpmm/barrett.hpp"

#include <bit>
#include <string>

#include "cimpmm/error.hpp"

namespace cimpmm {

BarrettParams barrett_precompute(u64 q, unsigned k) {
  if (k < 2 || k > 64) throw InvalidModulus("bitwidth k must be in [2, 64]");
  if ((q & 1) == 0) throw InvalidModulus("Barrett modulus must be odd");
  const bool above = q > (1ULL << (k - 1));
  const bool below = k == 64 || q < (1ULL << k);
  if (!above || !below) {
    throw InvalidModulus("modulus " + std::to_string(q) + " is not a " + std::to_string(k) + "-bit value");
  }
  BarrettParams bp;
  bp.q = q;
  bp.k = k;
  bp.m = 2 * k;
  WideUInt num = WideUInt(1) << bp.m;
  WideUInt mu = num / q;
  bp.mu = (static_cast<u128>((mu >> 64).convert_to<u64>()) << 64) | static_cast<u128>(static_cast<u64>(mu & ~u64{0}));
  return bp;
}

namespace {

u64 finish(u128 t, u64 q) {
  if (t >= q) t -= q;
  if (t >= q) t -= q;
  if (t >= q) throw Error("Barrett estimate off by more than two multiples of q");
  return static_cast<u64>(t);
}

}  // namespace

u64 barrett_reduce(u128 x, const BarrettParams& bp) {
  if (bp.m < 128 && (x >> bp.m) != 0) throw RangeError("Barrett input exceeds 2^m");
  if (bp.k <= 42) {
    const u128 est = (x * bp.mu) >> bp.m;
    return finish(x - est * bp.q, bp.q);
  }
  WideUInt prod = WideUInt(static_cast<u64>(x >> 64));
  prod <<= 64;
  prod |= static_cast<u64>(x);
  WideUInt mu = WideUInt(static_cast<u64>(bp.mu >> 64));
  mu <<= 64;
  mu |= static_cast<u64>(bp.mu);
  prod *= mu;
  prod >>= bp.m;
  // est <= x / q < 2^64 once x < 2^m.
  const u128 est = static_cast<u128>(prod.convert_to<u64>());
  return finish(x - est * bp.q, bp.q);
}

u64 barrett_reduce(const WideUInt& x, const BarrettParams& bp) {
  if ((x >> bp.m) != 0) throw RangeError("Barrett input exceeds 2^m");
  const u128 lo = (static_cast<u128>((x >> 64).convert_to<u64>()) << 64) | static_cast<u128>((x & ~u64{0}).convert_to<u64>());
  return barrett_reduce(lo, bp);
}

LimbReducer::LimbReducer(const BarrettParams& bp) : bp_(bp) {
  const unsigned limbs = (256 + bp.m - 1) / bp.m;
  limb_factors_.resize(limbs);
  // limb i carries weight 2^(m*i).
  const u64 step = static_cast<u64>((WideUInt(1) << bp.m) % bp.q);
  u64 f = 1 % bp.q;
  for (unsigned i = 0; i < limbs; ++i) {
    limb_factors_[i] = f;
    f = mul_mod(f, step, bp.q);
  }
}

unsigned LimbReducer::limb_count(const WideInt& v, unsigned m) {
  if (v == 0) return 1;
  const WideInt mag = v < 0 ? WideInt(-v) : v;
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(mag)) + 1;
  return (bits + m - 1) / m;
}

unsigned LimbReducer::limbs_for_ring(std::size_t n, unsigned k) {
  const unsigned log_n = static_cast<unsigned>(std::bit_width(n - 1));
  const unsigned bits = 2 * k + log_n + 1;
  return (bits + 2 * k - 1) / (2 * k);
}

u64 LimbReducer::reduce(const WideInt& v, unsigned limbs) const {
  if (limb_count(v, bp_.m) > limbs) throw RangeError("value wider than the reduction unit");
  return reduce(v);
}

u64 LimbReducer::reduce(const WideInt& v) const {
  const bool negative = v < 0;
  WideUInt mag = static_cast<WideUInt>(negative ? WideInt(-v) : v);
  const WideUInt mask = (WideUInt(1) << bp_.m) - 1;
  u64 acc = 0;
  for (std::size_t i = 0; mag != 0; ++i) {
    const u64 r = barrett_reduce(WideUInt(mag & mask), bp_);
    const u128 folded = static_cast<u128>(r) * limb_factors_[i];
    acc = add_mod(acc, barrett_reduce(folded, bp_), bp_.q);
    mag >>= bp_.m;
  }
  if (negative && acc != 0) acc = bp_.q - acc;
  return acc;
}

}  // namespace cimpmm
