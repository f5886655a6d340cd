#include "cimpmm/poly.hpp"

#include "cimpmm/error.hpp"

namespace cimpmm {

namespace {

void require_same_ring(const Polynomial& a, const Polynomial& b) {
  if (!(a.params() == b.params())) throw DimensionMismatch("operands belong to different rings");
}

}  // namespace

WideVector poly_mul_conv1d(const Polynomial& a, const Polynomial& b) {
  require_same_ring(a, b);
  const std::size_t n = a.size();
  std::vector<WideAccumulator> acc(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const u64 ai = a[i];
    if (ai == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      acc[i + j].add(static_cast<u128>(ai) * b[j]);
    }
  }
  WideVector w;
  w.vals.reserve(acc.size());
  for (const auto& s : acc) w.vals.push_back(s.value());
  return w;
}

std::vector<WideInt> reduce_degree(const WideVector& w, const RingParams& p) {
  const std::size_t n = p.n;
  if (w.size() != 2 * n - 1) throw DimensionMismatch("wide vector must have 2n-1 entries");
  std::vector<WideInt> out(w.vals.begin(), w.vals.begin() + n);
  for (std::size_t i = 0; i + n < w.size(); ++i) {
    if (p.phi == ModulusPoly::XnPlus1) {
      out[i] -= w.vals[i + n];
    } else {
      out[i] += w.vals[i + n];
    }
  }
  return out;
}

Polynomial pmm_reference(const Polynomial& a, const Polynomial& b) {
  const RingParams& p = a.params();
  const auto folded = reduce_degree(poly_mul_conv1d(a, b), p);
  std::vector<u64> c(p.n);
  for (std::size_t i = 0; i < p.n; ++i) c[i] = wide_mod(folded[i], p.q);
  return Polynomial(p, std::move(c));
}

Polynomial random_polynomial(const RingParams& p, std::mt19937_64& rng) {
  std::uniform_int_distribution<u64> dist(0, p.q - 1);
  std::vector<u64> c(p.n);
  for (auto& x : c) x = dist(rng);
  return Polynomial(p, std::move(c));
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  require_same_ring(a, b);
  const u64 q = a.params().q;
  std::vector<u64> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = add_mod(a[i], b[i], q);
  return Polynomial(a.params(), std::move(c));
}

}  // namespace cimpmm
