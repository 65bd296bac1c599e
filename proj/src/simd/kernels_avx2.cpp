#include <immintrin.h>

#include "dgmm/simd/kernels.hpp"

namespace dgmm::simd {

namespace {

double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

}  // namespace

double w0_energy_avx2(const W0Batch& b) {
  const __m256d a1 = _mm256_set1_pd(b.a1);
  const __m256d a2 = _mm256_set1_pd(b.a2);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d fac = _mm256_set1_pd(b.factor);
  __m256d acc = zero;
  std::size_t k = 0;
  for (; k + 4 <= b.n; k += 4) {
    const __m256d m11 = _mm256_loadu_pd(b.m11 + k);
    const __m256d m12 = _mm256_loadu_pd(b.m12 + k);
    const __m256d m21 = _mm256_loadu_pd(b.m21 + k);
    const __m256d m22 = _mm256_loadu_pd(b.m22 + k);
    const __m256d proj = _mm256_add_pd(_mm256_mul_pd(m12, a1), _mm256_mul_pd(m22, a2));
    const __m256d on_a = _mm256_cmp_pd(proj, zero, _CMP_GE_OQ);
    // d = m2 - a on the A branch, m2 + a otherwise.
    const __m256d d1 = _mm256_blendv_pd(_mm256_add_pd(m12, a1), _mm256_sub_pd(m12, a1), on_a);
    const __m256d d2 = _mm256_blendv_pd(_mm256_add_pd(m22, a2), _mm256_sub_pd(m22, a2), on_a);
    const __m256d w = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(m11, m11), _mm256_mul_pd(m21, m21)),
        _mm256_add_pd(_mm256_mul_pd(d1, d1), _mm256_mul_pd(d2, d2)));
    const __m256d wf = _mm256_mul_pd(_mm256_loadu_pd(b.weight + k), fac);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wf, w));
    if (b.g11) {
      const __m256d s = _mm256_mul_pd(two, wf);
      _mm256_storeu_pd(b.g11 + k, _mm256_mul_pd(s, m11));
      _mm256_storeu_pd(b.g12 + k, _mm256_mul_pd(s, d1));
      _mm256_storeu_pd(b.g21 + k, _mm256_mul_pd(s, m21));
      _mm256_storeu_pd(b.g22 + k, _mm256_mul_pd(s, d2));
    }
  }
  double total = hsum(acc);
  if (k < b.n) {
    W0Batch tail = b;
    tail.m11 += k, tail.m12 += k, tail.m21 += k, tail.m22 += k, tail.weight += k;
    tail.n = b.n - k;
    if (b.g11) tail.g11 += k, tail.g12 += k, tail.g21 += k, tail.g22 += k;
    total += w0_energy_scalar(tail);
  }
  return total;
}

double hessian_energy_avx2(const HessianBatch& b) {
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d four = _mm256_set1_pd(4.0);
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double* h11 = b.h11[c];
    const double* h12 = b.h12[c];
    const double* h22 = b.h22[c];
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= b.n; k += 4) {
      const __m256d w = _mm256_loadu_pd(b.weight + k);
      const __m256d x = _mm256_loadu_pd(h11 + k);
      const __m256d y = _mm256_loadu_pd(h12 + k);
      const __m256d z = _mm256_loadu_pd(h22 + k);
      const __m256d q = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(two, _mm256_mul_pd(y, y))),
          _mm256_mul_pd(z, z));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, q));
      if (b.o11[c]) {
        _mm256_storeu_pd(b.o11[c] + k, _mm256_mul_pd(_mm256_mul_pd(two, w), x));
        _mm256_storeu_pd(b.o12[c] + k, _mm256_mul_pd(_mm256_mul_pd(four, w), y));
        _mm256_storeu_pd(b.o22[c] + k, _mm256_mul_pd(_mm256_mul_pd(two, w), z));
      }
    }
    total += hsum(acc);
    for (; k < b.n; ++k) {
      const double w = b.weight[k];
      total += w * (h11[k] * h11[k] + 2.0 * h12[k] * h12[k] + h22[k] * h22[k]);
      if (b.o11[c]) {
        b.o11[c][k] = 2.0 * w * h11[k];
        b.o12[c][k] = 4.0 * w * h12[k];
        b.o22[c][k] = 2.0 * w * h22[k];
      }
    }
  }
  return total;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  double s = hsum(acc);
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

}  // namespace dgmm::simd
