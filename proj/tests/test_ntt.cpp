#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "cimpmm/error.hpp"
#include "cimpmm/ntt.hpp"
#include "cimpmm/poly.hpp"
#include "oracles.hpp"

using namespace cimpmm;

TEST(NttContext, SmallestRootsFromExhaustiveSearch) {
  const auto c4 = NttContext::make(4, 17);
  const auto roots4 = oracle::primitive_roots(4, 17);
  EXPECT_EQ(roots4, (std::vector<u64>{4, 13}));
  EXPECT_EQ(c4.omega, 4u);
  EXPECT_EQ(c4.psi, 2u);
  EXPECT_EQ(mul_mod(4, 4, 17), 16u);

  const auto c8 = NttContext::make(8, 17);
  const auto roots16 = oracle::primitive_roots(16, 17);
  EXPECT_EQ(c8.psi, roots16.front());
  EXPECT_EQ(c8.psi, 3u);
  EXPECT_EQ(pow_mod(c8.psi, 8, 17), 16u);
  EXPECT_EQ(c8.omega, 9u);

  const auto cyc = NttContext::make(8, 17, ModulusPoly::XnMinus1);
  EXPECT_EQ(cyc.omega, oracle::primitive_roots(8, 17).front());
  EXPECT_EQ(cyc.psi, 1u);
}

TEST(NttContext, RootOrderInvariants) {
  for (const auto& [n, q] : std::vector<std::pair<std::size_t, u64>>{{4, 17}, {8, 17}, {256, 7681}, {1024, 12289},
                                                                     {2048, 40961}}) {
    const auto c = NttContext::make(n, q);
    EXPECT_EQ(mul_mod(c.psi, c.psi, q), c.omega);
    EXPECT_EQ(pow_mod(c.omega, n, q), 1u);
    EXPECT_NE(pow_mod(c.omega, n / 2, q), 1u);
    EXPECT_EQ(mul_mod(c.n_inv, n % q, q), 1u);
  }
}

TEST(NttContext, UnsupportedRings) {
  EXPECT_THROW(NttContext::make(4, 16), UnsupportedParameters);
  EXPECT_THROW(NttContext::make(4, 15), UnsupportedParameters);   // composite
  EXPECT_THROW(NttContext::make(16, 17), UnsupportedParameters);  // 32 does not divide 16
  EXPECT_THROW(NttContext::make(6, 17), UnsupportedParameters);
}

TEST(NttContext, SmallestNttPrimes) {
  EXPECT_EQ(smallest_ntt_prime(8), 17u);
  EXPECT_EQ(smallest_ntt_prime(16), 97u);
  EXPECT_EQ(smallest_ntt_prime(32), 193u);
  EXPECT_EQ(smallest_ntt_prime(4, ModulusPoly::XnMinus1), 5u);
}

TEST(NttForward, FrozenSmallCase) {
  const auto c = NttContext::make(4, 17);
  const Polynomial a(c.params, {1, 2, 3, 4});
  EXPECT_EQ(ntt_forward(a, c), (std::vector<u64>{15, 13, 11, 16}));
  EXPECT_EQ(ntt_forward(a, c), oracle::dft({1, 2, 3, 4}, c.psi, c.omega, 17));
  EXPECT_EQ(ntt_forward(Polynomial::zero(c.params), c), std::vector<u64>(4, 0));
}

TEST(NttForward, MatchesNaiveTransform) {
  std::mt19937_64 rng(7);
  for (const auto phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
    for (const auto& [n, q] : std::vector<std::pair<std::size_t, u64>>{{8, 17}, {16, 97}, {64, 7681}}) {
      const auto c = NttContext::make(n, q, phi);
      const auto a = random_polynomial(c.params, rng);
      ASSERT_EQ(ntt_forward(a, c), oracle::dft({a.coeffs().begin(), a.coeffs().end()}, c.psi, c.omega, q));
    }
  }
}

TEST(NttForward, RoundTrip) {
  std::mt19937_64 rng(8);
  for (const auto& [n, q] : std::vector<std::pair<std::size_t, u64>>{{4, 17}, {16, 97}, {256, 7681}, {1024, 12289}}) {
    const auto c = NttContext::make(n, q);
    for (int i = 0; i < 250; ++i) {
      const auto a = random_polynomial(c.params, rng);
      ASSERT_EQ(ntt_inverse(ntt_forward(a, c), c), a);
    }
  }
}

TEST(PmmViaNtt, MatchesReference) {
  std::mt19937_64 rng(9);
  for (const auto phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
    for (const std::size_t n : {4, 8, 16}) {
      for (const u64 q : {17ULL, 7681ULL}) {
        NttContext c;
        try {
          c = NttContext::make(n, q, phi);
        } catch (const UnsupportedParameters&) {
          continue;
        }
        for (int i = 0; i < 1000; ++i) {
          const auto a = random_polynomial(c.params, rng), b = random_polynomial(c.params, rng);
          ASSERT_EQ(pmm_via_ntt(a, b, c), pmm_reference(a, b));
        }
      }
    }
  }
}

TEST(PmmViaNtt, WideModulus) {
  std::mt19937_64 rng(10);
  const std::size_t n = 1024;
  const auto c = NttContext::make(n, default_modulus(n, 60));
  for (int i = 0; i < 3; ++i) {
    const auto a = random_polynomial(c.params, rng), b = random_polynomial(c.params, rng);
    ASSERT_EQ(pmm_via_ntt(a, b, c), pmm_reference(a, b));
  }
}

TEST(PmmViaNtt, UnitAndZero) {
  std::mt19937_64 rng(11);
  const auto c = NttContext::make(16, 7681);
  const auto b = random_polynomial(c.params, rng);
  EXPECT_EQ(pmm_via_ntt(Polynomial::one(c.params), b, c), b);
  EXPECT_EQ(pmm_via_ntt(Polynomial::zero(c.params), b, c), Polynomial::zero(c.params));
}
