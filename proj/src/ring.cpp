#include "cimpmm/ring.hpp"

#include <bit>
#include <string>

#include "cimpmm/error.hpp"

namespace cimpmm {

std::string to_string(ModulusPoly phi) {
  return phi == ModulusPoly::XnPlus1 ? "x^n+1" : "x^n-1";
}

ModulusPoly modulus_poly_from_string(const std::string& s) {
  if (s == "x^n+1" || s == "plus" || s == "negacyclic") return ModulusPoly::XnPlus1;
  if (s == "x^n-1" || s == "minus" || s == "cyclic") return ModulusPoly::XnMinus1;
  throw ConfigError("unknown modulus polynomial '" + s + "'");
}

unsigned modulus_bitwidth(u64 q) { return static_cast<unsigned>(std::bit_width(q)); }

RingParams RingParams::make(std::size_t n, u64 q, ModulusPoly phi) {
  if (n < 4 || n > 8192 || !std::has_single_bit(n)) {
    throw InvalidModulus("degree n must be a power of two in [4, 8192], got " + std::to_string(n));
  }
  if (q < 3 || (q & 1) == 0) {
    throw InvalidModulus("modulus q must be odd and at least 3, got " + std::to_string(q));
  }
  RingParams p;
  p.n = n;
  p.q = q;
  p.k = modulus_bitwidth(q);
  p.phi = phi;
  return p;
}

u64 default_modulus(std::size_t n, unsigned k) {
  if (k < 2 || k > 64) throw InvalidModulus("bitwidth must be in [2, 64]");
  const u64 hi = k == 64 ? ~0ULL : (1ULL << k) - 1;
  const u64 lo = (1ULL << (k - 1)) + 1;
  const u64 step = 2 * static_cast<u64>(n);
  // Largest q = 1 (mod 2n) inside the range, scanning downwards.
  if (hi >= step) {
    u64 q = hi - (hi - 1) % step;
    for (int tries = 0; q >= lo && tries < 200000; ++tries) {
      if (is_prime(q)) return q;
      if (q < step) break;
      q -= step;
    }
  }
  for (u64 q = hi; q >= lo && q >= 3; q -= 2) {
    if (is_prime(q)) return q;
    if (hi - q > (1ULL << 20)) break;
  }
  return hi;
}

Polynomial::Polynomial(const RingParams& params, std::vector<u64> coeffs)
    : params_(params), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != params_.n) {
    throw DimensionMismatch("polynomial needs exactly n coefficients");
  }
  for (u64 c : coeffs_) {
    if (c >= params_.q) throw RangeError("coefficient not reduced modulo q");
  }
}

Polynomial Polynomial::zero(const RingParams& params) {
  return Polynomial(params, std::vector<u64>(params.n, 0));
}

Polynomial Polynomial::one(const RingParams& params) {
  std::vector<u64> c(params.n, 0);
  c[0] = 1;
  return Polynomial(params, std::move(c));
}

}  // namespace cimpmm
