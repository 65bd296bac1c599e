#include <doctest.h>

#include <random>
#include <vector>

#include "dgmm/energy.hpp"
#include "dgmm/simd/kernels.hpp"
#include "dgmm/sweep.hpp"

using namespace dgmm;

namespace {

struct Data {
  std::vector<double> v[12];
  std::vector<double> w;
  explicit Data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (auto& x : v) {
      x.resize(n);
      for (double& e : x) e = g(rng);
    }
    w.resize(n);
    for (double& e : w) e = std::abs(g(rng));
  }
};

}  // namespace

TEST_CASE("scalar kernels are always available") {
  CHECK(simd::isa_available(simd::Isa::Scalar));
  CHECK(std::string(simd::isa_name(simd::Isa::Scalar)) == "scalar");
}

#if defined(DGMM_HAVE_AVX2)
TEST_CASE("AVX2 kernels match the scalar kernels bit for bit") {
  if (!simd::isa_available(simd::Isa::Avx2)) return;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    Data d(n, n + 5);
    std::vector<double> gs[4], gv[4];
    for (int c = 0; c < 4; ++c) gs[c].assign(n, 0.0), gv[c].assign(n, 0.0);
    simd::W0Batch b{d.v[0].data(), d.v[1].data(), d.v[2].data(), d.v[3].data(), d.w.data(), n,
                    0.3, 0.9, 1.7};
    simd::W0Batch bs = b, bv = b;
    bs.g11 = gs[0].data(), bs.g12 = gs[1].data(), bs.g21 = gs[2].data(), bs.g22 = gs[3].data();
    bv.g11 = gv[0].data(), bv.g12 = gv[1].data(), bv.g21 = gv[2].data(), bv.g22 = gv[3].data();
    CHECK(simd::w0_energy_scalar(bs) == simd::w0_energy_avx2(bv));
    for (int c = 0; c < 4; ++c) CHECK(gs[c] == gv[c]);

    std::vector<double> os[6], ov[6];
    for (int c = 0; c < 6; ++c) os[c].assign(n, 0.0), ov[c].assign(n, 0.0);
    simd::HessianBatch h{{d.v[4].data(), d.v[5].data()}, {d.v[6].data(), d.v[7].data()},
                         {d.v[8].data(), d.v[9].data()}, d.w.data(), n};
    simd::HessianBatch hs = h, hv = h;
    for (int c = 0; c < 2; ++c) {
      hs.o11[c] = os[c].data(), hs.o12[c] = os[2 + c].data(), hs.o22[c] = os[4 + c].data();
      hv.o11[c] = ov[c].data(), hv.o12[c] = ov[2 + c].data(), hv.o22[c] = ov[4 + c].data();
    }
    CHECK(simd::hessian_energy_scalar(hs) == simd::hessian_energy_avx2(hv));
    for (int c = 0; c < 6; ++c) CHECK(os[c] == ov[c]);

    CHECK(simd::dot_scalar(d.v[10].data(), d.v[11].data(), n) ==
          simd::dot_avx2(d.v[10].data(), d.v[11].data(), n));
  }
}

TEST_CASE("energies agree across dispatch choices") {
  if (!simd::isa_available(simd::Isa::Avx2)) return;
  const GridSpec g = GridSpec::make(48, 40, -0.5, 0.5, -0.5, 0.5, true);
  const Field2D u = layer_field(g, WellPair({0.0, 1.0}), 0.1, 0.3);
  const Potential w = make_scaled(WellPair({0.0, 1.0}), 1.3);
  const simd::Isa before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  const double es = energy_E_eps(u, w, 0.1).total;
  simd::set_isa(simd::Isa::Avx2);
  const double ev = energy_E_eps(u, w, 0.1).total;
  simd::set_isa(before);
  CHECK(es == ev);
}
#endif
