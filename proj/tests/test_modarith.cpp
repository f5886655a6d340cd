#include <random>

#include <gtest/gtest.h>

#include "cimpmm/error.hpp"
#include "cimpmm/modarith.hpp"
#include "cimpmm/ring.hpp"
#include "oracles.hpp"

using namespace cimpmm;

TEST(ModArith, PowAndInverseAgreeWithOracle) {
  std::mt19937_64 rng(11);
  for (const u64 q : {17ULL, 7681ULL, 12289ULL, 4294967291ULL, 18446744073709551557ULL}) {
    std::uniform_int_distribution<u64> d(1, q - 1);
    for (int i = 0; i < 200; ++i) {
      const u64 a = d(rng), e = d(rng);
      EXPECT_EQ(pow_mod(a, e, q), oracle::power(a, e, q));
      const u64 inv = inv_mod(a, q);
      EXPECT_EQ(mul_mod(a, inv, q), 1u);
    }
  }
}

TEST(ModArith, InverseOfNonUnitThrows) {
  EXPECT_THROW(inv_mod(6, 9), UnsupportedParameters);
  EXPECT_THROW(inv_mod(0, 17), UnsupportedParameters);
}

TEST(ModArith, PrimalityMatchesTrialDivision) {
  for (u64 n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
  EXPECT_TRUE(is_prime(18446744073709551557ULL));
  EXPECT_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST(ModArith, AddSubStayCanonical) {
  const u64 q = 18446744073709551557ULL;
  EXPECT_EQ(add_mod(q - 1, q - 1, q), q - 2);
  EXPECT_EQ(sub_mod(0, 1, q), q - 1);
}

TEST(WideAccumulator, ShiftAddMatchesBigIntegers) {
  std::mt19937_64 rng(5);
  WideAccumulator acc;
  oracle::Big ref = 0;
  for (int i = 0; i < 60; ++i) {
    const u128 v = (static_cast<u128>(rng()) << 64) | rng();
    acc.shift_add(v);
    ref = ref * 2 + (oracle::Big(static_cast<u64>(v >> 64)) << 64) + static_cast<u64>(v);
    ASSERT_EQ(oracle::Big(acc.value().str()), ref);
  }
}

TEST(WideMod, NegativeValuesLandInRange) {
  EXPECT_EQ(wide_mod(WideInt(-56), 17), 12u);
  EXPECT_EQ(wide_mod(WideInt(-17), 17), 0u);
  EXPECT_EQ(wide_mod(WideInt(60), 17), 9u);
}

TEST(RingParams, DerivesBitwidth) {
  const auto r = RingParams::make(256, 7681);
  EXPECT_EQ(r.k, 13u);
  EXPECT_EQ(r.phi, ModulusPoly::XnPlus1);
  EXPECT_EQ(RingParams::make(4, 3).k, 2u);
  EXPECT_EQ(modulus_bitwidth(17), 5u);
  EXPECT_EQ(RingParams::make(8192, 18446744073709551557ULL).k, 64u);
}

TEST(RingParams, RejectsInvalidRings) {
  EXPECT_THROW(RingParams::make(6, 17), InvalidModulus);
  EXPECT_THROW(RingParams::make(2, 17), InvalidModulus);
  EXPECT_THROW(RingParams::make(16384, 17), InvalidModulus);
  EXPECT_THROW(RingParams::make(16, 16), InvalidModulus);
  EXPECT_THROW(RingParams::make(16, 1), InvalidModulus);
}

TEST(RingParams, ModulusPolyNames) {
  EXPECT_EQ(modulus_poly_from_string("x^n+1"), ModulusPoly::XnPlus1);
  EXPECT_EQ(modulus_poly_from_string("cyclic"), ModulusPoly::XnMinus1);
  EXPECT_EQ(to_string(ModulusPoly::XnMinus1), "x^n-1");
  EXPECT_THROW(modulus_poly_from_string("x^n"), ConfigError);
}

TEST(RingParams, DefaultModulusHasRequestedWidth) {
  for (const std::size_t n : {4, 64, 256, 2048}) {
    for (unsigned k = 2; k <= 64; ++k) {
      const u64 q = default_modulus(n, k);
      ASSERT_EQ(modulus_bitwidth(q), k) << n << " " << k;
      ASSERT_EQ(q % 2, 1u);
      ASSERT_NO_THROW(RingParams::make(n, q));
    }
  }
  const u64 q = default_modulus(256, 16);
  EXPECT_TRUE(oracle::is_prime(q));
  EXPECT_EQ(q % 512, 1u);
}

TEST(Polynomial, ValidatesLengthAndRange) {
  const auto r = RingParams::make(4, 17);
  EXPECT_THROW(Polynomial(r, {1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(Polynomial(r, {1, 2, 3, 17}), RangeError);
  const Polynomial p(r, {1, 2, 3, 16});
  EXPECT_EQ(p[3], 16u);
  EXPECT_EQ(Polynomial::one(r)[0], 1u);
  EXPECT_EQ(Polynomial::zero(r), Polynomial(r, {0, 0, 0, 0}));
}
