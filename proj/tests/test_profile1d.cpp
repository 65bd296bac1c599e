#include <doctest.h>

#include <cmath>

#include "dgmm/profile1d.hpp"

using namespace dgmm;

namespace {
const WellPair kE2({0.0, 1.0});
}

TEST_CASE("W0 heteroclinic") {
  const Potential w = make_w0(kE2);
  const Profile1D p = solve_profile_1d(w, 6.0, 600);
  CHECK(p.energy == doctest::Approx(2.0).epsilon(0.01));
  double dev = 0.0;
  for (std::size_t k = 0; k < p.s.size(); ++k) {
    const double s = p.s[k];
    const double f = s < 0 ? -(1.0 - std::exp(s)) : 1.0 - std::exp(-s);
    dev = std::max(dev, (p.g[k] - kE2.a() * f).norm());
  }
  CHECK(dev < 0.02);
  CHECK(equipartition_report(p, w).ratio <= 0.01);
}

TEST_CASE("energy scales with |a|^2") {
  const Profile1D p = solve_profile_1d(make_w0(WellPair({0.0, 2.0})), 6.0, 600);
  CHECK(p.energy == doctest::Approx(8.0).epsilon(0.01));
}

TEST_CASE("longer domain does not raise the energy") {
  const Potential w = make_w0(kE2);
  const double e6 = solve_profile_1d(w, 6.0, 600).energy;
  const double e12 = solve_profile_1d(w, 12.0, 1200).energy;
  CHECK(e12 <= e6 + 1e-6);
}

TEST_CASE("equipartition diagnostic") {
  const Potential w = make_w0(kE2);
  Profile1D ramp;
  ramp.half_len = 6.0;
  for (int k = 0; k < 601; ++k) {
    const double s = -6.0 + 12.0 * k / 600.0;
    ramp.s.push_back(s);
    ramp.g.push_back(kE2.a() * (s / 6.0));
  }
  CHECK(equipartition_report(ramp, w).ratio > 0.3);
  const Profile1D p = solve_profile_1d(make_scaled(kE2, 4.0), 6.0, 600);
  CHECK(equipartition_report(p, make_scaled(kE2, 4.0)).ratio <= 0.01);
  CHECK(p.energy == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("discrete gradient matches finite differences") {
  const Potential w = make_perturbed(kE2, 0.2, 3);
  std::vector<Vec2> g;
  for (int k = 0; k < 41; ++k) {
    const double t = -1.0 + 2.0 * k / 40.0;
    g.push_back({0.1 * std::sin(3.0 * t), std::tanh(2.0 * t)});
  }
  std::vector<Vec2> grad;
  profile_energy(w, 0.1, g, &grad);
  for (int k = 1; k < 40; k += 3) {
    for (int c = 0; c < 2; ++c) {
      auto gp = g, gm = g;
      const double step = 1e-6;
      (c ? gp[k].y : gp[k].x) += step;
      (c ? gm[k].y : gm[k].x) -= step;
      const double fd = (profile_energy(w, 0.1, gp) - profile_energy(w, 0.1, gm)) / (2 * step);
      CHECK((c ? grad[k].y : grad[k].x) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("K_* equals the restricted geodesic distance") {
  for (double f : {1.0, 1.21}) {
    const KStarReport r = check_K_star_equals_geodesic(make_scaled(kE2, f));
    CHECK(r.K_star == doctest::Approx(2.0 * std::sqrt(f)).epsilon(0.01));
    CHECK(r.rel_gap <= 0.02);
  }
  for (std::uint64_t seed = 0; seed < 2; ++seed)
    CHECK(check_K_star_equals_geodesic(make_perturbed(kE2, 0.4, seed)).rel_gap <= 0.02);
}

TEST_CASE("profile antiderivative") {
  const Profile1D p = solve_profile_1d(make_w0(kE2), 6.0, 600);
  const ProfileAntiderivative U = profile_antiderivative(p, kE2);
  CHECK(U.value(0.0).norm() == doctest::Approx(0.0));
  // Affine continuation beyond the ends.
  const Vec2 d = U.value(8.0) - U.value(7.0);
  CHECK((d - kE2.a()).norm() < 1e-12);
  CHECK((U.slope(-9.0) + kE2.a()).norm() < 1e-12);
}
