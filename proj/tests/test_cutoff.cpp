#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmm/cutoff.hpp"
#include "dgmm/error.hpp"

using namespace dgmm;

TEST_CASE("end values and flat zones") {
  const CutoffProfile r(0.3, 0.2, -1.0, 2.0);
  CHECK(r.value(0.1) == -1.0);
  CHECK(r.value(0.2) == -1.0);
  CHECK(r.value(0.4) == 2.0);
  CHECK(r.value(0.9) == 2.0);
  CHECK(r.value(0.3) == doctest::Approx(0.5));
  CHECK(r.d1(0.15) == 0.0);
  CHECK(r.d2(0.45) == 0.0);
  CHECK(CutoffProfile::order() == 2);
  CHECK_THROWS_AS(CutoffProfile(0.0, 0.0), Error);
}

TEST_CASE("derivative bounds on random samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double width = 0.01 + U(rng), from = 4 * U(rng) - 2, to = 4 * U(rng) - 2;
    const CutoffProfile r(U(rng) - 0.5, width, from, to);
    const double b1 = CutoffProfile::kD1Constant * std::abs(to - from) / width;
    const double b2 = CutoffProfile::kD2Constant * std::abs(to - from) / (width * width);
    CHECK(r.d1_bound() == doctest::Approx(b1));
    CHECK(r.d2_bound() == doctest::Approx(b2));
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double x = r.lo() - 0.1 * width + 1.2 * width * U(rng);
      m1 = std::max(m1, std::abs(r.d1(x)));
      m2 = std::max(m2, std::abs(r.d2(x)));
    }
    CHECK(m1 <= b1 * (1 + 1e-12));
    CHECK(m2 <= b2 * (1 + 1e-12));
  }
}

TEST_CASE("constants are sharp") {
  const CutoffProfile r(0.0, 1.0);
  CHECK(r.d1(0.0) == doctest::Approx(1.875));
  // |rho''| peaks at t = 1/2 -+ sqrt(3)/6.
  CHECK(std::abs(r.d2(-std::sqrt(3.0) / 6.0)) == doctest::Approx(10.0 / std::sqrt(3.0)));
}

TEST_CASE("derivatives agree with finite differences and are continuous") {
  const CutoffProfile r(0.1, 0.4, 0.5, -0.5);
  for (double x = -0.15; x <= 0.35; x += 0.013) {
    const double h = 1e-6;
    CHECK(r.d1(x) == doctest::Approx((r.value(x + h) - r.value(x - h)) / (2 * h)).epsilon(1e-6));
    CHECK(r.d2(x) == doctest::Approx((r.d1(x + h) - r.d1(x - h)) / (2 * h)).epsilon(1e-5));
  }
  for (double edge : {r.lo(), r.hi()}) {
    CHECK(std::abs(r.d1(edge + 1e-9)) < 1e-12);
    CHECK(std::abs(r.d2(edge + 1e-9)) < 1e-6);
  }
}
