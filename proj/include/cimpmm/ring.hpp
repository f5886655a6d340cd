#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cimpmm/modarith.hpp"

namespace cimpmm {

/// Modulus polynomial of the ring Z_q[x]/phi(x).
enum class ModulusPoly { XnPlus1, XnMinus1 };

std::string to_string(ModulusPoly phi);
ModulusPoly modulus_poly_from_string(const std::string& s);

/// Ring parameters: degree n (coefficient count), modulus q, bitwidth k.
///
/// Construct through make(), which enforces n a power of two in [4, 8192],
/// q odd and 2^(k-1) < q < 2^k with k = ceil(log2 q) in [2, 64].
struct RingParams {
  std::size_t n = 0;
  u64 q = 0;
  unsigned k = 0;
  ModulusPoly phi = ModulusPoly::XnPlus1;

  static RingParams make(std::size_t n, u64 q, ModulusPoly phi = ModulusPoly::XnPlus1);

  bool operator==(const RingParams&) const = default;
};

/// Smallest k with 2^(k-1) < q < 2^k, i.e. ceil(log2 q) for non powers of two.
unsigned modulus_bitwidth(u64 q);

/// Picks a modulus of exactly `k` bits for degree n: the largest prime
/// q = 1 (mod 2n) when one exists, else the largest prime, else 2^k - 1.
u64 default_modulus(std::size_t n, unsigned k);

/// A reduced ring element: exactly n residues in [0, q).
class Polynomial {
 public:
  Polynomial(const RingParams& params, std::vector<u64> coeffs);

  static Polynomial zero(const RingParams& params);
  static Polynomial one(const RingParams& params);

  const RingParams& params() const { return params_; }
  std::size_t size() const { return coeffs_.size(); }
  u64 operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const u64> coeffs() const { return coeffs_; }

  bool operator==(const Polynomial& other) const {
    return params_ == other.params_ && coeffs_ == other.coeffs_;
  }

 private:
  RingParams params_;
  std::vector<u64> coeffs_;
};

/// Unreduced linear-convolution product, length 2n - 1.
struct WideVector {
  std::vector<WideInt> vals;

  std::size_t size() const { return vals.size(); }
  bool operator==(const WideVector&) const = default;
};

}  // namespace cimpmm
