#include "dgmm/simd/kernels.hpp"

namespace dgmm::simd {

// The reductions keep four partial sums over blocks of four, combined pairwise, then add
// the remainder in order. This is the AVX2 summation order, so both variants agree to
// the bit.

namespace {

constexpr std::size_t kLanes = 4;

double combine(const double (&acc)[kLanes]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

double w0_term(const W0Batch& b, std::size_t k) {
  const double m11 = b.m11[k], m12 = b.m12[k], m21 = b.m21[k], m22 = b.m22[k];
  // The A branch wins ties (m2 . a >= 0).
  const bool on_a = (m12 * b.a1 + m22 * b.a2) >= 0.0;
  const double d1 = on_a ? m12 - b.a1 : m12 + b.a1;
  const double d2 = on_a ? m22 - b.a2 : m22 + b.a2;
  const double w = (m11 * m11 + m21 * m21) + (d1 * d1 + d2 * d2);
  const double wf = b.weight[k] * b.factor;
  if (b.g11) {
    const double s = 2.0 * wf;
    b.g11[k] = s * m11;
    b.g12[k] = s * d1;
    b.g21[k] = s * m21;
    b.g22[k] = s * d2;
  }
  return wf * w;
}

double hessian_term(const HessianBatch& b, int c, std::size_t k) {
  const double w = b.weight[k];
  const double x = b.h11[c][k], y = b.h12[c][k], z = b.h22[c][k];
  if (b.o11[c]) {
    b.o11[c][k] = (2.0 * w) * x;
    b.o12[c][k] = (4.0 * w) * y;
    b.o22[c][k] = (2.0 * w) * z;
  }
  return w * ((x * x + 2.0 * (y * y)) + z * z);
}

}  // namespace

double w0_energy_scalar(const W0Batch& b) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + kLanes <= b.n; k += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += w0_term(b, k + l);
  double total = combine(acc);
  // The AVX2 tail sums into a fresh accumulator before adding.
  double tail = 0.0;
  for (; k < b.n; ++k) tail += w0_term(b, k);
  return total + tail;
}

double hessian_energy_scalar(const HessianBatch& b) {
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + kLanes <= b.n; k += kLanes)
      for (std::size_t l = 0; l < kLanes; ++l) acc[l] += hessian_term(b, c, k + l);
    total += combine(acc);
    for (; k < b.n; ++k) total += hessian_term(b, c, k);
  }
  return total;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += x[k + l] * y[k + l];
  double s = combine(acc);
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

}  // namespace dgmm::simd
