#include <algorithm>
#include <cmath>
#include <limits>

#include "dgmm/error.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

namespace {

double radical_inverse(std::size_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Fills `out` with Halton points of the 4D cube [-R, R]^4 lying inside the ball B_R.
void halton_ball(double radius, std::size_t n, std::vector<Mat2>& out) {
  static constexpr unsigned kBases[4] = {2, 3, 5, 7};
  std::size_t idx = 1;  // skip the origin-mapped index 0
  std::size_t accepted = 0;
  while (accepted < n) {
    std::array<double, 4> e{};
    double r2 = 0.0;
    for (int j = 0; j < 4; ++j) {
      e[j] = radius * (2.0 * radical_inverse(idx, kBases[j]) - 1.0);
      r2 += e[j] * e[j];
    }
    ++idx;
    if (r2 <= radius * radius) {
      out.push_back(Mat2::from_array(e));
      ++accepted;
    }
  }
}

}  // namespace

std::vector<Mat2> ball_samples(double radius, std::size_t n_interior, std::size_t n_surface) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidInput, "ball radius must be positive");
  std::vector<Mat2> out;
  out.reserve(n_interior + n_surface);
  halton_ball(radius, n_interior, out);
  std::vector<Mat2> shell;
  halton_ball(1.0, n_surface, shell);
  for (const Mat2& m : shell) {
    const double r = m.norm();
    if (r > 0.0) out.push_back(m * (radius / r));
  }
  return out;
}

std::vector<Mat2> generate_samples(const WellPair& wells, const SampleSpec& spec) {
  const double R = spec.ball_radius_factor * wells.a().norm();
  std::vector<Mat2> out = ball_samples(R, spec.n_ball);
  const Mat2 A = wells.A();
  for (std::size_t k = 0; k < spec.n_segment; ++k) {
    const double t = spec.n_segment == 1
                         ? 0.0
                         : -spec.segment_extent + 2.0 * spec.segment_extent * k /
                                                      static_cast<double>(spec.n_segment - 1);
    out.push_back(A * t);
  }
  return out;
}

GrowthEstimate verify_growth(const Potential& w, std::span<const Mat2> samples) {
  GrowthEstimate est;
  for (const Mat2& m : samples) {
    const double w0 = eval_W0(m, w.wells());
    const double wv = w(m);
    if (w0 == 0.0) {
      if (wv != 0.0) {
        est.violation = true;
        est.C = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    if (!(wv > 0.0))
      throw Error(ErrorKind::NotDoubleWell, "potential vanishes away from the wells");
    est.C = std::max({est.C, wv / w0, w0 / wv});
    ++est.samples_used;
  }
  return est;
}

InverseQuadraticEstimate inverse_quadratic_constant(const Potential& w, double alpha,
                                                    std::span<const Mat2> samples) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha must be positive");
  const Mat2 A = w.wells().A();
  InverseQuadraticEstimate est;
  for (const Mat2& m : samples) {
    const double dA = (m - A).norm2();
    const double dB = (m + A).norm2();
    if (std::min(dA, dB) < alpha * alpha) continue;
    const double wv = w(m);
    if (!(wv > 0.0)) continue;
    est.C = std::max(est.C, std::max(dA, dB) / wv);
    ++est.samples_used;
  }
  est.envelope_constant = alpha * est.C;
  est.envelope = std::max(2.0, est.envelope_constant / alpha);
  return est;
}

SigmaEstimate estimate_perturbation_sigma(const Potential& w, std::span<const Mat2> samples) {
  SigmaEstimate est;
  for (const Mat2& m : samples) {
    const double w0 = eval_W0(m, w.wells());
    if (!(w0 > 0.0)) continue;
    const double s0 = std::sqrt(w0);
    est.sigma = std::max(est.sigma, std::abs(std::sqrt(w(m)) - s0) / s0);
    ++est.samples_used;
  }
  est.pass = est.sigma < 0.5;
  return est;
}

}  // namespace dgmm
