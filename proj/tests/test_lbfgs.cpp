#include <doctest.h>

#include <cmath>
#include <vector>

#include "dgmm/lbfgs.hpp"

using namespace dgmm;

namespace {

// Chained Rosenbrock, minimum 0 at (1, ..., 1).
double rosenbrock(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (double& v : g) v = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
    g[i] += -400.0 * x[i] * a - 2.0 * b;
    g[i + 1] += 200.0 * a;
  }
  return f;
}

}  // namespace

TEST_CASE("quadratic converges on the gradient test") {
  Objective f = [](std::span<const double> x, std::span<double> g) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double c = static_cast<double>(i + 1);
      v += 0.5 * c * (x[i] - 1.0) * (x[i] - 1.0);
      g[i] = c * (x[i] - 1.0);
    }
    return v;
  };
  std::vector<double> x(20, 0.0);
  const LbfgsResult r = lbfgs_minimize(f, x);
  CHECK(r.converged);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Rosenbrock in 10 dimensions") {
  std::vector<double> x(10, -1.2);
  LbfgsOptions o;
  o.rel_tol = 1e-15;
  const LbfgsResult r = lbfgs_minimize(rosenbrock, x, o);
  CHECK(r.converged);
  CHECK(r.f < 1e-12);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("iteration budget is reported") {
  std::vector<double> x(10, -1.2);
  LbfgsOptions o;
  o.max_iterations = 3;
  const LbfgsResult r = lbfgs_minimize(rosenbrock, x, o);
  CHECK_FALSE(r.converged);
  CHECK(r.reason == "max iterations");
  CHECK(r.iterations == 3);
}

TEST_CASE("empty problem is trivially converged") {
  std::vector<double> x;
  const LbfgsResult r = lbfgs_minimize([](std::span<const double>, std::span<double>) { return 0.0; }, x);
  CHECK(r.converged);
}
