#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmm/error.hpp"
#include "dgmm/potentials.hpp"

using namespace dgmm;

namespace {

const WellPair kE2({0.0, 1.0});

Mat2 random_matrix(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return {u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("W0 point values") {
  const Mat2 A = kE2.A();
  CHECK(eval_W0(A, kE2) == 0.0);
  CHECK(eval_W0(-A, kE2) == 0.0);
  CHECK(eval_W0(Mat2{}, kE2) == doctest::Approx(1.0));
  // m1 = e1 (first column), m2 = 0.
  CHECK(eval_W0(Mat2::from_columns({1.0, 0.0}, {0.0, 0.0}), kE2) == doctest::Approx(2.0));
}

TEST_CASE("W0 gradient matches central differences away from the tie") {
  std::mt19937_64 rng(11);
  const Potential w = make_w0(WellPair({0.3, 0.8}));
  for (int n = 0; n < 200; ++n) {
    const Mat2 m = random_matrix(rng, 2.0);
    // Skip points near the switching surface of the min.
    const Vec2 m2{m.m12, m.m22};
    if (std::abs((m2 - w.wells().a()).norm2() - (m2 + w.wells().a()).norm2()) < 1e-3) continue;
    const Mat2 g = w.gradient(m);
    auto arr = m.as_array();
    const auto garr = g.as_array();
    for (int k = 0; k < 4; ++k) {
      const double step = 1e-6;
      auto p = arr, q = arr;
      p[k] += step;
      q[k] -= step;
      const double fd = (w(Mat2::from_array(p)) - w(Mat2::from_array(q))) / (2.0 * step);
      CHECK(garr[k] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("wells are the only zeros of the perturbed class") {
  const Potential w = make_perturbed(kE2, 0.3, 5);
  CHECK(w(kE2.A()) == 0.0);
  CHECK(w(kE2.B()) == 0.0);
  std::mt19937_64 rng(3);
  for (int n = 0; n < 1000; ++n) {
    const Mat2 m = random_matrix(rng, 3.0);
    const double w0 = eval_W0(m, kE2);
    CHECK(std::abs(std::sqrt(w(m)) - std::sqrt(w0)) <= 0.3 * std::sqrt(w0) + 1e-15);
  }
}

TEST_CASE("growth constant") {
  const std::vector<Mat2> pts = generate_samples(kE2);
  CHECK(verify_growth(make_w0(kE2), pts).C == doctest::Approx(1.0));
  CHECK(verify_growth(make_scaled(kE2, 2.25), pts).C == doctest::Approx(2.25));

  // W0 plus a bump of height 1/2 at the origin: the ratio there is exactly 1.5.
  const Potential w0 = make_w0(kE2);
  auto bump = [](const Mat2& m) { return 0.5 * std::exp(-m.norm2() / 0.01); };
  const Potential bumped(
      kE2, PotentialKind::Custom, "bump", [&](const Mat2& m) { return eval_W0(m, kE2) + bump(m); },
      [&](const Mat2& m) { return w0.gradient(m) + m * (-2.0 / 0.01 * bump(m)); });
  const std::vector<Mat2> origin{Mat2{}, kE2.A() * 2.0};
  CHECK(verify_growth(bumped, origin).C == doctest::Approx(1.5));
  CHECK(verify_growth(bumped, pts).C >= 1.5 - 1e-12);

  // A potential vanishing off the wells is rejected.
  const Potential bad(kE2, PotentialKind::Custom, "bad",
                      [&](const Mat2& m) { return m.norm2() < 1e-12 ? 0.0 : eval_W0(m, kE2); },
                      [&](const Mat2& m) { return w0.gradient(m); });
  CHECK_THROWS_AS(verify_growth(bad, origin), Error);
}

TEST_CASE("inverse quadratic constant") {
  const Potential w = make_w0(kE2);
  std::vector<Mat2> seg;
  for (int k = -200; k <= 200; ++k) seg.push_back(kE2.A() * (1.5 * k / 200.0));
  const double alpha = 1.0;
  const InverseQuadraticEstimate est = inverse_quadratic_constant(w, alpha, seg);
  REQUIRE(std::isfinite(est.C));
  REQUIRE(est.samples_used > 0);
  for (const Mat2& m : seg) {
    const double dA = (m - kE2.A()).norm2(), dB = (m + kE2.A()).norm2();
    if (std::min(dA, dB) < alpha * alpha) continue;
    CHECK(std::max(dA, dB) <= est.C * w(m) * (1.0 + 1e-12));
  }
  // Ball samples: shrinking the admissible set never raises the constant.
  const std::vector<Mat2> pts = generate_samples(kE2, {20000, 4.0, 200, 1.5});
  double prev = inverse_quadratic_constant(w, 0.25, pts).C;
  for (double a : {0.5, 1.0, 2.5}) {
    const double c = inverse_quadratic_constant(w, a, pts).C;
    CHECK(c <= prev + 1e-12);
    prev = c;
  }
}

TEST_CASE("perturbation sigma") {
  const std::vector<Mat2> pts = generate_samples(kE2);
  CHECK(estimate_perturbation_sigma(make_w0(kE2), pts).sigma == doctest::Approx(0.0));
  const SigmaEstimate s121 = estimate_perturbation_sigma(make_scaled(kE2, 1.21), pts);
  CHECK(s121.sigma == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(s121.pass);
  const SigmaEstimate s225 = estimate_perturbation_sigma(make_scaled(kE2, 2.25), pts);
  CHECK(s225.sigma == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(s225.pass);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    CHECK(estimate_perturbation_sigma(make_perturbed(kE2, 0.4, seed), pts).sigma <= 0.4 + 1e-12);
}

TEST_CASE("samples are deterministic") {
  const auto a = generate_samples(kE2, {500, 4.0, 50, 1.5});
  const auto b = generate_samples(kE2, {500, 4.0, 50, 1.5});
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK((a[k] - b[k]).norm() == 0.0);
}
