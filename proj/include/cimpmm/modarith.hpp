#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace cimpmm {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Signed accumulator wide enough for n * (q-1)^2 with n <= 8192 and q < 2^64,
// plus the sign produced by degree folding.
using WideInt = boost::multiprecision::int256_t;
using WideUInt = boost::multiprecision::uint256_t;

inline WideInt to_wide(u128 v) {
  WideInt out = static_cast<u64>(v >> 64);
  out <<= 64;
  out |= static_cast<u64>(v);
  return out;
}

/// 192-bit unsigned accumulator (u128 low part plus a carry word) for sums
/// that may exceed 2^128 but stay well below 2^192.
struct WideAccumulator {
  u128 lo = 0;
  u64 hi = 0;

  void add(u128 v) {
    const u128 s = lo + v;
    hi += s < lo;
    lo = s;
  }
  /// this = 2 * this + v
  void shift_add(u128 v) {
    hi = (hi << 1) | static_cast<u64>(lo >> 127);
    lo <<= 1;
    add(v);
  }
  WideInt value() const {
    WideInt out = to_wide(lo);
    if (hi) out += WideInt(hi) << 128;
    return out;
  }
};

inline u64 mul_mod(u64 a, u64 b, u64 q) { return static_cast<u64>(static_cast<u128>(a) * b % q); }

inline u64 add_mod(u64 a, u64 b, u64 q) {
  u128 s = static_cast<u128>(a) + b;
  return static_cast<u64>(s >= q ? s - q : s);
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + (q - b); }

u64 pow_mod(u64 base, u64 exp, u64 q);

/// Modular inverse; throws UnsupportedParameters when gcd(a, q) != 1.
u64 inv_mod(u64 a, u64 q);

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(u64 n);

/// Canonical residue of a signed wide value, by plain integer remainder.
u64 wide_mod(const WideInt& v, u64 q);

}  // namespace cimpmm
