#pragma once

#include <cstddef>

namespace dgmm::simd {

// Structure-of-arrays batch for factor * W0 evaluated at per-node gradients.
// Gradient outputs, when non-null, receive weight * factor * dW0/dM.
struct W0Batch {
  const double* m11;
  const double* m12;
  const double* m21;
  const double* m22;
  const double* weight;
  std::size_t n;
  double a1, a2;
  double factor;
  double* g11 = nullptr;
  double* g12 = nullptr;
  double* g21 = nullptr;
  double* g22 = nullptr;
};

// sum weight (|H11|^2 + 2|H12|^2 + |H22|^2) over both components. Outputs, when
// non-null, receive 2 w H11, 4 w H12 and 2 w H22.
struct HessianBatch {
  const double* h11[2];
  const double* h12[2];
  const double* h22[2];
  const double* weight;
  std::size_t n;
  double* o11[2] = {nullptr, nullptr};
  double* o12[2] = {nullptr, nullptr};
  double* o22[2] = {nullptr, nullptr};
};

double w0_energy_scalar(const W0Batch& b);
double hessian_energy_scalar(const HessianBatch& b);
double dot_scalar(const double* x, const double* y, std::size_t n);

#if defined(DGMM_HAVE_AVX2)
double w0_energy_avx2(const W0Batch& b);
double hessian_energy_avx2(const HessianBatch& b);
double dot_avx2(const double* x, const double* y, std::size_t n);
#endif

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
// Whether the build contains the variant and the CPU supports it.
bool isa_available(Isa isa);
// Selected at first use: the best available variant unless DGMM_SIMD=scalar is set.
Isa active_isa();
// Overrides the selection (falls back to scalar when unavailable). Not thread-safe with
// concurrent kernel calls; meant for tests and start-up.
void set_isa(Isa isa);

double w0_energy(const W0Batch& b);
double hessian_energy(const HessianBatch& b);
double dot(const double* x, const double* y, std::size_t n);

}  // namespace dgmm::simd
