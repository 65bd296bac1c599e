#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmm/energy.hpp"
#include "dgmm/sweep.hpp"

using namespace dgmm;

namespace {

const WellPair kE2({0.0, 1.0});

Field2D smooth_field(const GridSpec& g) {
  Field2D u = Field2D::zeros(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double x = g.x1(i), y = g.x2(j);
      const double px = 2.0 * std::numbers::pi * x;
      u.set(i, j, {0.1 * std::sin(px) * std::cos(3 * y), 0.4 * std::tanh(4 * y) + 0.05 * std::cos(px) * y});
    }
  return u;
}

}  // namespace

TEST_CASE("affine field at a well has zero energy") {
  const GridSpec g = GridSpec::make(33, 33, -0.5, 0.5, -0.5, 0.5, false);
  Field2D u = Field2D::zeros(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) u.set(i, j, kE2.a() * g.x2(j) + Vec2{0.3, -0.1});
  CHECK(energy_E_eps(u, make_w0(kE2), 0.1).total == doctest::Approx(0.0).epsilon(1e-24));
}

TEST_CASE("embedded heteroclinic") {
  const GridSpec g = GridSpec::make(256, 256, -0.5, 0.5, -0.5, 0.5, false);
  const Field2D u = layer_field(g, kE2, 0.05);
  CHECK(energy_E_eps(u, make_w0(kE2), 0.05).total == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("eps enters linearly") {
  const GridSpec g = GridSpec::make(40, 40, -0.5, 0.5, -0.5, 0.5, true);
  const Field2D u = smooth_field(g);
  const Potential w = make_w0(kE2);
  const EnergyReport a = energy_E_eps(u, w, 0.2), b = energy_E_eps(u, w, 0.1);
  CHECK(b.potential_term == doctest::Approx(2.0 * a.potential_term).epsilon(1e-14));
  CHECK(b.hessian_term == doctest::Approx(0.5 * a.hessian_term).epsilon(1e-14));
}

TEST_CASE("invariances") {
  const GridSpec g = GridSpec::make(40, 40, -0.5, 0.5, -0.5, 0.5, true);
  const Field2D u = smooth_field(g);
  const Potential w = make_w0(kE2);
  const double e = energy_E_eps(u, w, 0.1).total;
  Field2D shifted = u, rolled = u;
  for (std::size_t k = 0; k < g.size(); ++k) shifted.u1[k] += 1.5, shifted.u2[k] -= 0.25;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) rolled.set((i + 7) % g.n1, j, u.at(i, j));
  CHECK(energy_E_eps(shifted, w, 0.1).total == doctest::Approx(e).epsilon(1e-13));
  CHECK(energy_E_eps(rolled, w, 0.1).total == doctest::Approx(e).epsilon(1e-13));
}

TEST_CASE("energy gradient matches finite differences") {
  for (bool periodic : {true, false}) {
    const GridSpec g = GridSpec::make(12, 10, -0.5, 0.5, -0.5, 0.5, periodic);
    const Field2D u = smooth_field(g);
    const GridOperators ops(g);
    const std::vector<double> wts = quadrature_weights(g);
    for (const Potential& w : {make_w0(kE2), make_perturbed(kE2, 0.2, 1)}) {
      Field2D gW = Field2D::zeros(g), gH = Field2D::zeros(g);
      energy_terms(u, w, ops, wts, &gW, &gH);
      for (std::size_t k = 3; k < g.size(); k += 17) {
        for (int c = 0; c < 2; ++c) {
          Field2D p = u, m = u;
          const double step = 1e-6;
          p.comp(c)[k] += step;
          m.comp(c)[k] -= step;
          const EnergyTerms ep = energy_terms(p, w, ops, wts), em = energy_terms(m, w, ops, wts);
          CHECK(gW.comp(c)[k] == doctest::Approx((ep.E_W - em.E_W) / (2 * step)).epsilon(1e-5));
          CHECK(gH.comp(c)[k] == doctest::Approx((ep.E_H - em.E_H) / (2 * step)).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("region breakdown adds up on disjoint halves") {
  const GridSpec g = GridSpec::make(41, 21, -0.5, 0.5, -0.5, 0.5, false);
  const Field2D u = smooth_field(g);
  const double h = g.h1;
  const std::vector<Region> parts{{"left", -0.5, -0.5 * h, -1, 1}, {"right", 0.5 * h, 0.5, -1, 1}};
  const EnergyReport r = energy_E_eps(u, make_w0(kE2), 0.1, nullptr, parts);
  CHECK(r.regions.size() == 2);
  CHECK(r.regions[0].total > 0.0);
  CHECK(r.regions[0].total + r.regions[1].total <= r.total + 1e-12);
}
