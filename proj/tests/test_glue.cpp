#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmm/cutoff.hpp"
#include "dgmm/error.hpp"
#include "dgmm/glue.hpp"
#include "dgmm/sweep.hpp"

using namespace dgmm;

namespace {

const WellPair kE2({0.0, 1.0});
const Mat2 A = kE2.A();

const Potential& w0() {
  static const Potential w = make_w0(kE2);
  return w;
}

const DistanceContext& ctx() {
  static const DistanceContext c = make_distance_context(w0(), -A, A);
  return c;
}

double oriented(double x1, Side side) { return side == Side::Right ? x1 : -x1; }

// x1-independent field whose columns are the given trace.
Field2D tiled(const TraceProfile& t, int n1) {
  const GridSpec g = GridSpec::make(n1, static_cast<int>(t.size()), -0.5, 0.5, t.s.front(),
                                    t.s.back(), false);
  Field2D u = Field2D::zeros(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) u.set(i, j, t.u[static_cast<std::size_t>(j)]);
  return u;
}

double max_d1(const Field2D& u) {
  const GridOperators ops(u.grid);
  const FieldDerivatives d = differentiate(u, ops, false);
  double m = 0.0;
  for (int c = 0; c < 2; ++c)
    for (double v : d.d1[c]) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Balanced index.

TEST_CASE("balanced index examples") {
  const std::vector<double> one{0.4};
  CHECK(select_balanced_index(one, one, one, 1, 1, 1, 1.5) == 0);
  const std::vector<double> a{0.3, 0.7}, b{0.9, 0.1}, c{0.5, 0.5};
  CHECK(select_balanced_index(a, b, c, 1, 1, 1, 2.0) == 0);
}

TEST_CASE("balanced index against brute force") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(U(rng) * 40);
    const double tau = 1.01 + 2.0 * U(rng);
    std::vector<double> a(n), b(n), c(n);
    for (int k = 0; k < n; ++k) a[k] = std::pow(U(rng), 4), b[k] = U(rng), c[k] = std::pow(U(rng), 8);
    double sa = 0, sb = 0, sc = 0;
    for (int k = 0; k < n; ++k) sa += a[k], sb += b[k], sc += c[k];
    const double Ca = sa * (1 + U(rng)), Cb = sb * (1 + U(rng)), Cc = sc;
    const std::size_t k0 = select_balanced_index(a, b, c, Ca, Cb, Cc, tau);
    auto ok = [&](std::size_t k) {
      return a[k] <= tau * Ca / n && b[k] <= 2 * tau * Cb / ((tau - 1) * n) &&
             c[k] <= 2 * tau * Cc / ((tau - 1) * n);
    };
    REQUIRE(k0 < static_cast<std::size_t>(n));
    CHECK(ok(k0));
    for (std::size_t k = 0; k < k0; ++k) CHECK_FALSE(ok(k));
  }
}

TEST_CASE("balanced index rejects invalid input") {
  const std::vector<double> a{0.5, 0.5}, neg{-0.1, 0.5}, e;
  CHECK_THROWS_AS(select_balanced_index(neg, a, a, 1, 1, 1, 1.5), Error);
  CHECK_THROWS_AS(select_balanced_index(a, a, a, 0.5, 1, 1, 1.5), Error);
  CHECK_THROWS_AS(select_balanced_index(a, a, a, 1, 1, 1, 1.0), Error);
  CHECK_THROWS_AS(select_balanced_index(e, e, e, 1, 1, 1, 1.5), Error);
}

// ---------------------------------------------------------------------------
// Traces.

TEST_CASE("trace antiderivative") {
  const TraceProfile t = sine_transition_trace(uniform_nodes(-0.5, 0.5, 201), kE2, 0.05, 0.1, 0.02);
  CHECK(t.derivative_mismatch() < 1e-3);
  const TraceAntiderivative F(t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK((F.value(t.s[k]) - (t.u[k] - t.u[0])).norm() < 1e-14);
    CHECK((F.slope(t.s[k]) - t.d2u[k]).norm() < 1e-12);
  }
  CHECK((F.value(0.7) - F.value(0.6) - kE2.a() * 0.1).norm() < 1e-14);
  CHECK((F.value(-0.7) - F.value(-0.6) + kE2.a() * -0.1).norm() < 1e-14);
}

TEST_CASE("shifted trace") {
  const auto s = uniform_nodes(-0.5, 0.5, 401);
  const TraceProfile t = sine_transition_trace(s, kE2, 0.0, 0.1);
  const TraceProfile sh = shift_trace(t, 0.03);
  const TraceProfile ref = sine_transition_trace(s, kE2, -0.03, 0.1);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK((sh.d2u[k] - ref.d2u[k]).norm() < 1e-3);
}

// ---------------------------------------------------------------------------
// Slice selection and the horizontal modification.

TEST_CASE("slice of an x1-independent field") {
  const GridSpec g = GridSpec::make(401, 201, -0.5, 0.5, -0.5, 0.5, false);
  const Field2D u = layer_field(g, kE2, 0.05);
  const double K = energy_E_eps(u, w0(), 0.05).total;
  for (Side side : {Side::Right, Side::Left}) {
    const SliceSelection s = select_trace_slice(u, w0(), 0.05, 0.2, 1.5, side, K);
    const double lo = 0.5 - 0.4, width = 0.2 / s.intervals;
    const double edge = lo + (s.interval_index - 1) * width;
    CHECK(oriented(s.s_value, side) >= edge - 1e-9);
    CHECK(oriented(s.s_value, side) < edge + g.h1 - 1e-9);
    CHECK(s.trace_energy == doctest::Approx(s.band_energy / 0.2).epsilon(1e-9));
    CHECK(s.trace_energy < 1.5 * K);
  }
}

// Large enough to push its subinterval past the bound, small enough to stay in budget.
constexpr double kBubble = 3e-3;

TEST_CASE("slice avoids an energy bubble") {
  const GridSpec g = GridSpec::make(401, 201, -0.5, 0.5, -0.5, 0.5, false);
  Field2D u = layer_field(g, kE2, 0.05);
  const double K = 2.0 * energy_E_eps(u, w0(), 0.05).total;
  const SliceSelection clean = select_trace_slice(u, w0(), 0.05, 0.2, 1.5, Side::Right, K);
  const double width = 0.2 / clean.intervals;
  const double c = 0.1 + (clean.interval_index - 0.5) * width;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double r2 = (std::pow(g.x1(i) - c, 2) + std::pow(g.x2(j), 2)) / (0.25 * width * width);
      u.u1[g.index(i, j)] += kBubble * std::exp(-r2);
    }
  const SliceSelection s = select_trace_slice(u, w0(), 0.05, 0.2, 1.5, Side::Right, K);
  CHECK(s.interval_index != clean.interval_index);
  CHECK(std::abs(s.s_value - c) > 0.5 * width);
}

TEST_CASE("slice postcondition on random fields") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const GridSpec g = GridSpec::make(201, 161, -0.5, 0.5, -0.5, 0.5, false);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Field2D u = layer_field(g, kE2, 0.05, 0.2 * U(rng), 1 + trial % 6);
    const double K = energy_E_eps(u, w0(), 0.05).total * (1.0 + 0.2 * U(rng));
    for (Side side : {Side::Right, Side::Left}) {
      try {
        const SliceSelection s = select_trace_slice(u, w0(), 0.05, 0.05 + 0.15 * U(rng), 1.5, side, K);
        CHECK(s.trace_energy < 1.5 * K);
        ++checked;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
      }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("horizontal modification") {
  const GridSpec g = GridSpec::make(401, 201, -0.5, 0.5, -0.5, 0.5, false);
  SUBCASE("x1-independent input is extended constantly") {
    const Field2D u = layer_field(g, kE2, 0.05);
    const double K = energy_E_eps(u, w0(), 0.05).total;
    HorizontalReport rep;
    const Field2D w = modify_horizontal(u, w0(), 0.05, 0.1, 1.5, K, &rep);
    CHECK(max_d1(w) < 1e-12);
    CHECK(rep.total_energy == doctest::Approx((1.0 + 2.0 * rep.delta) * rep.input_energy).epsilon(1e-9));
  }
  SUBCASE("interior is copied bit for bit") {
    const Field2D u = layer_field(g, kE2, 0.05, 0.05);
    const double K = energy_E_eps(u, w0(), 0.05).total;
    HorizontalReport rep;
    const Field2D w = modify_horizontal(u, w0(), 0.05, 0.1, 1.5, K, &rep);
    const int n_ext = static_cast<int>(std::lround(rep.delta / g.h1));
    int compared = 0;
    for (int i = 0; i < g.n1; ++i) {
      if (std::abs(g.x1(i)) >= 0.5 - 2.0 * rep.delta) continue;
      for (int j = 0; j < g.n2; ++j) {
        CHECK(w.u1[w.grid.index(i + n_ext, j)] == u.u1[g.index(i, j)]);
        CHECK(w.u2[w.grid.index(i + n_ext, j)] == u.u2[g.index(i, j)]);
      }
      ++compared;
    }
    CHECK(compared > 0);
    // Outside the slices the extension is constant in x1.
    const Field2D& wf = w;
    for (int j = 0; j < g.n2; j += 10) {
      CHECK((wf.at(0, j) - wf.at(n_ext, j)).norm() == 0.0);
      CHECK((wf.at(wf.grid.n1 - 1, j) - wf.at(wf.grid.n1 - 1 - n_ext, j)).norm() == 0.0);
    }
  }
  SUBCASE("band energy budget is enforced") {
    const Field2D u = layer_field(g, kE2, 0.05, 0.3);
    const double K = 0.5 * energy_E_eps(u, w0(), 0.05).total;
    CHECK_THROWS_AS(modify_horizontal(u, w0(), 0.05, 0.1, 1.5, K), Error);
  }
}

// ---------------------------------------------------------------------------
// Interpolants.

TEST_CASE("translation interpolant") {
  const TraceProfile phi = heteroclinic_trace(uniform_nodes(-0.5, 0.5, 201), kE2, 0.05);
  SUBCASE("beta = 0 is x1-independent") {
    InterpolantReport rep;
    const Field2D f = build_translation_interpolant(phi, 0.0, 0.25, 0.05, 0.0, &rep);
    CHECK(max_d1(f) < 1e-12);
    const double slab = energy_E_eps(tiled(phi, 5), w0(), 0.05).total;
    CHECK(energy_E_eps(f, w0(), 0.05).total == doctest::Approx(0.5 * slab).epsilon(1e-9));
  }
  SUBCASE("trace conditions and flat ends") {
    InterpolantReport rep;
    build_translation_interpolant(phi, 0.07, 0.25, 0.05, 0.0, &rep);
    CHECK(rep.left_trace_error <= 1e-12);
    CHECK(rep.right_trace_error <= 1e-12);
    CHECK(rep.flatness <= 1e-10);
    CHECK(rep.flat_columns > 0);
  }
  SUBCASE("excess energy grows like beta squared") {
    std::vector<double> betas{0.02, 0.05, 0.1}, excess;
    const double base = energy_E_eps(build_translation_interpolant(phi, 0.0, 0.25, 0.05), w0(), 0.05).total;
    for (double b : betas)
      excess.push_back(energy_E_eps(build_translation_interpolant(phi, b, 0.25, 0.05), w0(), 0.05).total - base);
    CHECK(loglog_slope(betas, excess) == doctest::Approx(2.0).epsilon(0.1));
  }
  CHECK_THROWS_AS(build_translation_interpolant(phi, 0.0, 0.02, 0.05), Error);
}

TEST_CASE("same-midpoint interpolant") {
  const auto s = uniform_nodes(-0.5, 0.5, 401);
  const TraceProfile phi = sine_transition_trace(s, kE2, 0.01, 0.05, 0.02);
  SUBCASE("psi = phi") {
    const Field2D f = build_same_midpoint_interpolant(phi, phi, 0.1, 0.02, 0.2, 3.0, w0(), ctx());
    CHECK(max_d1(f) < 1e-12);
  }
  SUBCASE("distinct traces with a common midpoint") {
    const TraceProfile psi = sine_transition_trace(s, kE2, 0.01, 0.06, 0.04);
    InterpolantReport rep;
    const Field2D f = build_same_midpoint_interpolant(phi, psi, 0.1, 0.02, 0.2, 3.0, w0(), ctx(), 0.0, &rep);
    CHECK(rep.left_trace_error <= 1e-12);
    CHECK(rep.right_trace_error <= 1e-12);
    CHECK(rep.flatness <= 1e-10);
    CHECK(std::isfinite(energy_E_eps(f, w0(), 0.02).total));
  }
  SUBCASE("mismatched midpoints are rejected") {
    const TraceProfile psi = sine_transition_trace(s, kE2, 0.05, 0.05);
    CHECK_THROWS_AS(build_same_midpoint_interpolant(phi, psi, 0.1, 0.02, 0.2, 3.0, w0(), ctx()), Error);
  }
}

TEST_CASE("combined interpolant") {
  const auto s = uniform_nodes(-0.5, 0.5, 401);
  const double eps = 0.02, h = 0.2, ht = 0.99 * h / std::sqrt(eps);
  const TraceProfile phi = sine_transition_trace(s, kE2, 0.0, 0.05, 0.02);
  SUBCASE("psi = phi reduces to the beta = 0 translation") {
    InterpolantReport rep;
    const Field2D f = build_combined_interpolant(phi, phi, 0.1, eps, h, ht, 3.0, w0(), ctx(), 0.0, &rep);
    CHECK(rep.beta == 0.0);
    CHECK(rep.doubled_tail);
    const Field2D t = build_translation_interpolant(phi, 0.0, 0.1, eps);
    REQUIRE(f.u1.size() == t.u1.size());
    double diff = 0.0;
    for (std::size_t k = 0; k < f.u1.size(); ++k)
      diff = std::max({diff, std::abs(f.u1[k] - t.u1[k]), std::abs(f.u2[k] - t.u2[k])});
    CHECK(diff <= 1e-12);
  }
  SUBCASE("randomized pairs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const RandomPair p = random_admissible_pair(kE2, seed, eps, 0.05);
      InterpolantReport rep;
      const Field2D f = build_combined_interpolant(p.phi, p.psi, 0.1, eps, h, ht, 3.0, w0(), ctx(), 0.0, &rep);
      CHECK(rep.left_trace_error <= 1e-8);
      CHECK(rep.right_trace_error <= 1e-8);
      CHECK(rep.flatness <= 1e-8);
      CHECK(rep.junction_jump <= 1e-12);
      CHECK(rep.junction_gradient_jump <= 1e-10);
      CHECK(std::abs(rep.beta - (rep.s_phi - rep.s_psi)) < 1e-15);
      CHECK(std::isfinite(energy_E_eps(f, w0(), eps).total));
    }
  }
  SUBCASE("distant midpoints are rejected") {
    const TraceProfile psi = sine_transition_trace(s, kE2, 0.1, 0.05);
    CHECK_THROWS_AS(build_combined_interpolant(phi, psi, 0.1, eps, h, 0.5, 3.0, w0(), ctx()), Error);
  }
}

// ---------------------------------------------------------------------------
// Periodic recovery.

TEST_CASE("recovery of an x1-independent field") {
  const double eps = 0.02;
  const TraceProfile t = sine_transition_trace(uniform_nodes(-0.5, 0.5, 201), kE2, 0.0, 2.33 * eps);
  const Field2D u = tiled(t, 201);
  const double E = energy_E_eps(u, w0(), eps).total;
  RecoveryReport rep;
  const Field2D z = construct_periodic_recovery(u, w0(), eps, 0.1, 1.5, 0.2, E, ctx(), &rep);
  CHECK(rep.stage == "done");
  CHECK(rep.wrap_mismatch <= 1e-8);
  CHECK(rep.junction_jump <= 1e-12);
  CHECK(rep.energy == doctest::Approx(2.0 * E).epsilon(1e-9));
  CHECK(max_d1(z) < 1e-10);
}

TEST_CASE("recovery reports the failing stage") {
  const double eps = 0.02;
  const TraceProfile t = sine_transition_trace(uniform_nodes(-0.5, 0.5, 201), kE2, 0.0, 2.33 * eps);
  const Field2D u = tiled(t, 201);
  const double E = energy_E_eps(u, w0(), eps).total;
  RecoveryReport rep;
  CHECK_THROWS_AS(construct_periodic_recovery(u, w0(), eps, 0.1, 1.5, 0.2, 0.5 * E, ctx(), &rep), Error);
  CHECK(rep.stage == "horizontal modification");
  const Field2D odd = tiled(t, 200);
  CHECK_THROWS_AS(construct_periodic_recovery(odd, w0(), eps, 0.1, 1.5, 0.2, E, ctx(), &rep), Error);
  CHECK(rep.stage == "input");
}
