#pragma once

#include <random>
#include <vector>

#include "cimpmm/ring.hpp"

namespace cimpmm {

/// Schoolbook linear convolution in exact integer arithmetic.
WideVector poly_mul_conv1d(const Polynomial& a, const Polynomial& b);

/// Polynomial long-division remainder by phi(x) before coefficient reduction:
/// out[i] = w[i] -/+ w[i + n]. The result may be negative for x^n + 1.
std::vector<WideInt> reduce_degree(const WideVector& w, const RingParams& p);

/// Ground-truth PMM: convolution, degree fold, then plain remainder mod q.
Polynomial pmm_reference(const Polynomial& a, const Polynomial& b);

/// Uniform residues from `rng`.
Polynomial random_polynomial(const RingParams& p, std::mt19937_64& rng);

/// Coefficient-wise (a + b) mod q.
Polynomial poly_add(const Polynomial& a, const Polynomial& b);

}  // namespace cimpmm
