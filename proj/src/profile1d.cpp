#include "dgmm/profile1d.hpp"

#include <algorithm>
#include <cmath>

#include "dgmm/error.hpp"
#include "dgmm/lbfgs.hpp"

namespace dgmm {

namespace {

Mat2 embed(const Vec2& g) { return Mat2::from_columns({0.0, 0.0}, g); }

}  // namespace

double profile_energy(const Potential& w, double h, const std::vector<Vec2>& g,
                      std::vector<Vec2>* grad, double* potential_part, double* derivative_part) {
  const std::size_t n = g.size();
  double ep = 0.0, ed = 0.0;
  if (grad) grad->assign(n, Vec2{});
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    const Mat2 m = embed(g[i]);
    ep += wt * w(m);
    if (grad) (*grad)[i] = (*grad)[i] + w.gradient(m).col2() * wt;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = g[i + 1] - g[i];
    ed += d.norm2() / h;
    if (grad) {
      (*grad)[i] = (*grad)[i] - d * (2.0 / h);
      (*grad)[i + 1] = (*grad)[i + 1] + d * (2.0 / h);
    }
  }
  if (potential_part) *potential_part = ep;
  if (derivative_part) *derivative_part = ed;
  return ep + ed;
}

Profile1D solve_profile_1d(const Potential& w, double half_len, int n_points) {
  if (!(half_len >= 1.0)) throw Error(ErrorKind::InvalidInput, "half_len must be >= 1");
  if (n_points < 64) throw Error(ErrorKind::InvalidInput, "n_points must be >= 64");
  const std::size_t n = static_cast<std::size_t>(n_points);
  const Vec2 a = w.wells().a();
  const double h = 2.0 * half_len / static_cast<double>(n - 1);
  Profile1D p;
  p.half_len = half_len;
  p.s.resize(n);
  p.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.s[i] = -half_len + h * static_cast<double>(i);
    p.g[i] = a * (p.s[i] / half_len);
  }
  p.g.front() = -a;
  p.g.back() = a;

  std::vector<Vec2> work = p.g, grad;
  Objective f = [&](std::span<const double> x, std::span<double> gx) {
    for (std::size_t i = 1; i + 1 < n; ++i) work[i] = {x[2 * (i - 1)], x[2 * (i - 1) + 1]};
    const double v = profile_energy(w, h, work, &grad);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      gx[2 * (i - 1)] = grad[i].x;
      gx[2 * (i - 1) + 1] = grad[i].y;
    }
    return v;
  };
  std::vector<double> x(2 * (n - 2));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    x[2 * (i - 1)] = p.g[i].x;
    x[2 * (i - 1) + 1] = p.g[i].y;
  }
  LbfgsOptions lo;
  lo.max_iterations = 200000;
  lo.rel_tol = 1e-13;
  lo.window = 20;
  const LbfgsResult r = lbfgs_minimize(f, x, lo);
  if (!r.converged) throw Error(ErrorKind::NoConvergence, "1D profile solver hit its budget");
  for (std::size_t i = 1; i + 1 < n; ++i) p.g[i] = {x[2 * (i - 1)], x[2 * (i - 1) + 1]};
  p.energy = profile_energy(w, h, p.g, nullptr, &p.potential_part, &p.derivative_part);
  p.iterations = r.iterations;
  return p;
}

EquipartitionReport equipartition_report(const Profile1D& p, const Potential& w) {
  EquipartitionReport rep;
  const double total =
      profile_energy(w, p.spacing(), p.g, nullptr, &rep.potential_part, &rep.derivative_part);
  rep.ratio = total > 0.0 ? std::abs(rep.potential_part - rep.derivative_part) / total : 0.0;
  return rep;
}

ContinuationResult solve_profile_continuation(const Potential& w, const ContinuationOptions& opts) {
  if (opts.half_lens.empty()) throw Error(ErrorKind::InvalidInput, "empty continuation list");
  std::vector<double> lens = opts.half_lens;
  for (double L = lens.back() + 2.0; L <= opts.max_half_len; L += 2.0) lens.push_back(L);
  ContinuationResult res;
  double prev = 0.0;
  for (std::size_t k = 0; k < lens.size(); ++k) {
    const int n = std::max(64, static_cast<int>(std::lround(opts.points_per_unit * lens[k])));
    res.profile = solve_profile_1d(w, lens[k], n);
    res.trace.push_back({lens[k], n, res.profile.energy});
    if (k > 0 && std::abs(res.profile.energy - prev) <= opts.rel_change * std::abs(prev) &&
        k + 1 >= opts.half_lens.size()) {
      res.settled = true;
      break;
    }
    prev = res.profile.energy;
  }
  return res;
}

KStarReport check_K_star_equals_geodesic(const Potential& w, const ContinuationOptions& copts,
                                         GeodesicOptions gopts) {
  KStarReport rep;
  const ContinuationResult c = solve_profile_continuation(w, copts);
  rep.K_star = c.profile.energy;
  rep.trace = c.trace;
  rep.settled = c.settled;
  gopts.free_entries = {false, true, false, true};
  const Mat2 A = w.wells().A();
  const GeodesicResult g = geodesic_distance(w.restricted(), -A, A, gopts);
  rep.d_tilde = g.d;
  rep.d_tilde_uncertainty = g.uncertainty;
  rep.rel_gap = std::abs(rep.K_star - rep.d_tilde) / rep.d_tilde;
  return rep;
}

Vec2 ProfileAntiderivative::value(double t) const {
  if (t <= s.front()) return U.front() + (-a) * (t - s.front());
  if (t >= s.back()) return U.back() + a * (t - s.back());
  const auto it = std::upper_bound(s.begin(), s.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double h = s[k + 1] - s[k];
  const double x = t - s[k];
  // Exact integral of the piecewise-linear g.
  const Vec2 slope_change = (g[k + 1] - g[k]) * (1.0 / h);
  return U[k] + g[k] * x + slope_change * (0.5 * x * x);
}

Vec2 ProfileAntiderivative::slope(double t) const {
  if (t <= s.front()) return -a;
  if (t >= s.back()) return a;
  const auto it = std::upper_bound(s.begin(), s.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double lam = (t - s[k]) / (s[k + 1] - s[k]);
  return g[k] * (1.0 - lam) + g[k + 1] * lam;
}

ProfileAntiderivative profile_antiderivative(const Profile1D& p, const WellPair& wells) {
  ProfileAntiderivative ad;
  ad.s = p.s;
  ad.g = p.g;
  ad.a = wells.a();
  ad.U.assign(p.s.size(), Vec2{});
  for (std::size_t k = 1; k < p.s.size(); ++k)
    ad.U[k] = ad.U[k - 1] + (p.g[k - 1] + p.g[k]) * (0.5 * (p.s[k] - p.s[k - 1]));
  // Shift so that U(0) = 0.
  const Vec2 u0 = ad.value(0.0);
  for (Vec2& v : ad.U) v = v - u0;
  return ad;
}

}  // namespace dgmm
