#include <atomic>
#include <cstdlib>
#include <cstring>

#include "dgmm/simd/kernels.hpp"

namespace dgmm::simd {

namespace {

bool cpu_has_avx2() {
#if defined(DGMM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("DGMM_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& selected() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() { return static_cast<Isa>(selected().load(std::memory_order_relaxed)); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::Scalar;
  selected().store(static_cast<int>(isa), std::memory_order_relaxed);
}

double w0_energy(const W0Batch& b) {
#if defined(DGMM_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return w0_energy_avx2(b);
#endif
  return w0_energy_scalar(b);
}

double hessian_energy(const HessianBatch& b) {
#if defined(DGMM_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return hessian_energy_avx2(b);
#endif
  return hessian_energy_scalar(b);
}

double dot(const double* x, const double* y, std::size_t n) {
#if defined(DGMM_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return dot_avx2(x, y, n);
#endif
  return dot_scalar(x, y, n);
}

}  // namespace dgmm::simd
