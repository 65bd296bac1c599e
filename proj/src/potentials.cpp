#include "dgmm/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "dgmm/error.hpp"

namespace dgmm {

WellPair::WellPair(Vec2 a) : a_(a) {
  if (!(a.norm() > 0.0) || !std::isfinite(a.norm()))
    throw Error(ErrorKind::InvalidInput, "well vector must be nonzero and finite");
}

const char* kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::Reference: return "w0";
    case PotentialKind::Scaled: return "scaled";
    case PotentialKind::Perturbed: return "perturbed";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

Potential::Potential(WellPair wells, PotentialKind kind, std::string name, EvalFn eval,
                     GradFn grad, std::optional<double> growth_constant,
                     std::optional<double> w0_factor)
    : wells_(wells),
      kind_(kind),
      name_(std::move(name)),
      eval_(std::move(eval)),
      grad_(std::move(grad)),
      growth_constant_(growth_constant),
      w0_factor_(w0_factor) {}

Potential Potential::restricted() const {
  auto ev = eval_;
  auto gr = grad_;
  auto eval = [ev](const Mat2& m) { return ev(Mat2{0.0, m.m12, 0.0, m.m22}); };
  auto grad = [gr](const Mat2& m) {
    Mat2 g = gr(Mat2{0.0, m.m12, 0.0, m.m22});
    return Mat2{0.0, g.m12, 0.0, g.m22};
  };
  // W0 restricted to the m2 subspace is no longer a multiple of W0, so drop the fast path.
  return Potential(wells_, PotentialKind::Custom, name_ + "~", eval, grad, std::nullopt,
                   std::nullopt);
}

double eval_W0(const Mat2& m, const WellPair& wells) {
  const Vec2 a = wells.a();
  const Vec2 m2 = m.col2();
  const double first = m.m11 * m.m11 + m.m21 * m.m21;
  return first + std::min((m2 - a).norm2(), (m2 + a).norm2());
}

Mat2 grad_W0(const Mat2& m, const WellPair& wells, double softness) {
  const Vec2 a = wells.a();
  const Vec2 m2 = m.col2();
  const Vec2 dA = m2 - a;
  const Vec2 dB = m2 + a;
  Vec2 g2;
  if (softness > 0.0) {
    const double x = dA.norm2();
    const double y = dB.norm2();
    const double lo = std::min(x, y);
    const double wa = std::exp(-(x - lo) / softness);
    const double wb = std::exp(-(y - lo) / softness);
    const double s = wa + wb;
    g2 = (dA * (2.0 * wa / s)) + (dB * (2.0 * wb / s));
  } else {
    g2 = (m2.dot(a) >= 0.0) ? dA * 2.0 : dB * 2.0;
  }
  return Mat2::from_columns(m.col1() * 2.0, g2);
}

Potential make_w0(const WellPair& wells, double softness) {
  if (softness < 0.0) throw Error(ErrorKind::InvalidInput, "softness must be >= 0");
  if (softness == 0.0) {
    return Potential(
        wells, PotentialKind::Reference, "w0",
        [wells](const Mat2& m) { return eval_W0(m, wells); },
        [wells](const Mat2& m) { return grad_W0(m, wells, 0.0); }, 1.0, 1.0);
  }
  auto eval = [wells, softness](const Mat2& m) {
    const Vec2 a = wells.a();
    const Vec2 m2 = m.col2();
    const double x = (m2 - a).norm2();
    const double y = (m2 + a).norm2();
    const double lo = std::min(x, y);
    const double smin =
        lo - softness * std::log(std::exp(-(x - lo) / softness) + std::exp(-(y - lo) / softness));
    return m.col1().norm2() + smin;
  };
  return Potential(
      wells, PotentialKind::Custom, "w0-soft", eval,
      [wells, softness](const Mat2& m) { return grad_W0(m, wells, softness); });
}

Potential make_scaled(const WellPair& wells, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error(ErrorKind::InvalidInput, "scale factor must be positive");
  return Potential(
      wells, PotentialKind::Scaled, "scaled",
      [wells, factor](const Mat2& m) { return factor * eval_W0(m, wells); },
      [wells, factor](const Mat2& m) { return grad_W0(m, wells) * factor; },
      std::max(factor, 1.0 / factor), factor);
}

namespace {

struct TrigField {
  static constexpr int kTerms = 4;
  double c[kTerms];
  double omega[kTerms][4];
  double phase[kTerms];
  double inv_norm;

  explicit TrigField(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    std::normal_distribution<double> nw(0.0, 1.0);
    std::uniform_real_distribution<double> up(0.0, 2.0 * std::numbers::pi);
    double s = 0.0;
    for (int k = 0; k < kTerms; ++k) {
      c[k] = uc(rng);
      for (int j = 0; j < 4; ++j) omega[k][j] = nw(rng);
      phase[k] = up(rng);
      s += std::abs(c[k]);
    }
    inv_norm = s > 0.0 ? 1.0 / s : 0.0;
  }

  double value(const Mat2& m) const {
    const auto e = m.as_array();
    double p = 0.0;
    for (int k = 0; k < kTerms; ++k) {
      double arg = phase[k];
      for (int j = 0; j < 4; ++j) arg += omega[k][j] * e[j];
      p += c[k] * std::sin(arg);
    }
    return p * inv_norm;
  }

  Mat2 gradient(const Mat2& m) const {
    const auto e = m.as_array();
    std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < kTerms; ++k) {
      double arg = phase[k];
      for (int j = 0; j < 4; ++j) arg += omega[k][j] * e[j];
      const double w = c[k] * std::cos(arg) * inv_norm;
      for (int j = 0; j < 4; ++j) g[j] += w * omega[k][j];
    }
    return Mat2::from_array(g);
  }
};

}  // namespace

Potential make_perturbed(const WellPair& wells, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || sigma >= 1.0)
    throw Error(ErrorKind::InvalidInput, "perturbation amplitude must lie in [0, 1)");
  const TrigField field(seed);
  auto eval = [wells, sigma, field](const Mat2& m) {
    const double f = 1.0 + sigma * field.value(m);
    return eval_W0(m, wells) * f * f;
  };
  auto grad = [wells, sigma, field](const Mat2& m) {
    const double f = 1.0 + sigma * field.value(m);
    const double w0 = eval_W0(m, wells);
    return grad_W0(m, wells) * (f * f) + field.gradient(m) * (2.0 * f * sigma * w0);
  };
  const double c = (1.0 + sigma) * (1.0 + sigma);
  const double lo = (1.0 - sigma) * (1.0 - sigma);
  return Potential(wells, PotentialKind::Perturbed, "perturbed", eval, grad,
                   std::max(c, 1.0 / lo));
}

}  // namespace dgmm
