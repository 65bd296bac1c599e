#include "dgmm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dgmm/error.hpp"

namespace dgmm {

void Curve::validate() const {
  if (s.size() < 2 || s.size() != m.size())
    throw Error(ErrorKind::InvalidInput, "curve needs at least two samples");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1]))
      throw Error(ErrorKind::InvalidInput, "curve parameters must be strictly increasing");
}

Mat2 Curve::at(double t) const {
  if (t <= s.front()) return m.front();
  if (t >= s.back()) return m.back();
  const auto it = std::upper_bound(s.begin(), s.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double lam = (t - s[k]) / (s[k + 1] - s[k]);
  return m[k] * (1.0 - lam) + m[k + 1] * lam;
}

Curve Curve::reversed() const {
  Curve r;
  r.s.resize(s.size());
  r.m.resize(m.size());
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    r.s[k] = -s[n - 1 - k];
    r.m[k] = m[n - 1 - k];
  }
  return r;
}

Curve Curve::segment(const Mat2& from, const Mat2& to, std::size_t points, double s_lo,
                     double s_hi) {
  if (points < 2) throw Error(ErrorKind::InvalidInput, "segment needs at least two points");
  Curve c;
  c.s.resize(points);
  c.m.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double lam = static_cast<double>(k) / static_cast<double>(points - 1);
    c.s[k] = s_lo + (s_hi - s_lo) * lam;
    c.m[k] = from * (1.0 - lam) + to * lam;
  }
  return c;
}

double curve_length_LW(const Curve& phi, const Potential& w) {
  phi.validate();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    const Mat2 mid = (phi.m[k] + phi.m[k + 1]) * 0.5;
    total += 2.0 * std::sqrt(std::max(0.0, w(mid))) * (phi.m[k + 1] - phi.m[k]).norm();
  }
  return total;
}

double curve_energy_I_eps(const Curve& phi, const Potential& w, double eps, double tail_tol) {
  phi.validate();
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const Mat2 A = w.wells().A();
  auto near_well = [&](const Mat2& m) {
    return std::min((m - A).norm(), (m + A).norm()) <= tail_tol;
  };
  if (!near_well(phi.m.front()) || !near_well(phi.m.back()))
    throw Error(ErrorKind::NonWellTails, "curve endpoints are not at the wells");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    const double ds = phi.s[k + 1] - phi.s[k];
    const Mat2 mid = (phi.m[k] + phi.m[k + 1]) * 0.5;
    total += w(mid) * ds / eps + eps * (phi.m[k + 1] - phi.m[k]).norm2() / ds;
  }
  return total;
}

namespace {

struct BallHit {
  bool hit = false;
  double lo = 0.0, hi = 0.0;
};

// Parameter interval where the segment p + lam d, lam in [0, 1], lies in the open ball.
BallHit segment_in_ball(const Mat2& p, const Mat2& d, const Mat2& c, double r) {
  const Mat2 pc = p - c;
  const double qa = d.norm2();
  const double qb = 2.0 * pc.dot(d);
  const double qc = pc.norm2() - r * r;
  BallHit h;
  if (qa == 0.0) {
    if (qc < 0.0) h = {true, 0.0, 1.0};
    return h;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return h;
  const double sq = std::sqrt(disc);
  // Numerically stable roots.
  const double q = -0.5 * (qb + std::copysign(sq, qb));
  double r1 = q / qa;
  double r2 = q != 0.0 ? qc / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  const double lo = std::max(r1, 0.0);
  const double hi = std::min(r2, 1.0);
  if (lo < hi) h = {true, lo, hi};
  return h;
}

}  // namespace

SeparationPoint phase_separation(const Curve& phi, double alpha, const Mat2& from,
                                 const Mat2& to) {
  phi.validate();
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha must be positive");
  double exit_from = -std::numeric_limits<double>::infinity();
  double entry_to = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    const Mat2 d = phi.m[k + 1] - phi.m[k];
    const double ds = phi.s[k + 1] - phi.s[k];
    const BallHit hf = segment_in_ball(phi.m[k], d, from, alpha);
    if (hf.hit) exit_from = std::max(exit_from, phi.s[k] + hf.hi * ds);
    const BallHit ht = segment_in_ball(phi.m[k], d, to, alpha);
    if (ht.hit) entry_to = std::min(entry_to, phi.s[k] + ht.lo * ds);
  }
  if (!std::isfinite(exit_from) || !std::isfinite(entry_to))
    throw Error(ErrorKind::NotAdmissible, "curve does not visit both well neighbourhoods");
  if (!(exit_from < entry_to))
    throw Error(ErrorKind::NotAdmissible, "last exit does not precede first entry");
  return {0.5 * (exit_from + entry_to), exit_from, entry_to};
}

double admissibility_gamma(const Mat2& from, const Mat2& to, const Potential& w, const Curve& phi,
                           const DistanceContext& ctx) {
  const double L = curve_length_LW(phi, w);
  if (L >= 3.0 * ctx.d)
    throw Error(ErrorKind::HypothesisViolated, "curve length is not below 3 d_W");
  return std::min((from - to).norm() / 2.0, (3.0 * ctx.d - L) / (8.0 * ctx.lip_d));
}

double alpha_K(const WellPair& wells, double K, const DistanceContext& ctx) {
  if (K >= 3.0 * ctx.d) throw Error(ErrorKind::HypothesisViolated, "K is not below 3 d_W(A, B)");
  return std::min((3.0 * ctx.d - K) / (12.0 * ctx.lip_d), wells.separation() / 8.0);
}

AdmissiblePair make_admissible_pair(const Curve& phi, double alpha, const Mat2& from,
                                    const Mat2& to, const Potential& w,
                                    const DistanceContext& ctx) {
  AdmissiblePair p;
  p.gamma = admissibility_gamma(from, to, w, phi, ctx);
  if (!(alpha < p.gamma)) throw Error(ErrorKind::NotAdmissible, "alpha is not below gamma");
  p.curve = phi;
  p.alpha = alpha;
  p.from = from;
  p.to = to;
  p.s_sep = phase_separating_point(phi, alpha, from, to);
  return p;
}

DifferenceBoundReport difference_bound_check(const Curve& phi, const Curve& psi, double alpha,
                                             const Mat2& from, const Mat2& to, const Potential& w,
                                             double s_tol) {
  DifferenceBoundReport rep;
  rep.s_phi = phase_separating_point(phi, alpha, from, to);
  rep.s_psi = phase_separating_point(psi, alpha, from, to);
  if (std::abs(rep.s_phi - rep.s_psi) > s_tol)
    throw Error(ErrorKind::MidpointMismatch, "phase separating points differ");
  std::vector<double> ts(phi.s);
  ts.insert(ts.end(), psi.s.begin(), psi.s.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  constexpr double kSlack = 1e-14;
  for (double t : ts) {
    const Mat2 a = phi.at(t), b = psi.at(t);
    const double num = (a - b).norm2();
    const double den = w(a) + w(b);
    if (den < kSlack) {
      if (num < kSlack) continue;
      rep.C_empirical = std::numeric_limits<double>::infinity();
    } else {
      rep.C_empirical = std::max(rep.C_empirical, num / den);
    }
    ++rep.samples_used;
  }
  return rep;
}

Curve TraceProfile::zeta() const {
  Curve c;
  c.s = s;
  c.m.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) c.m[k] = Mat2::from_columns(d1u[k], d2u[k]);
  return c;
}

double TraceProfile::derivative_mismatch() const {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double ds = s[k + 1] - s[k];
    const Vec2 fd = (u[k + 1] - u[k]) * (1.0 / ds);
    const Vec2 avg = (d2u[k] + d2u[k + 1]) * 0.5;
    worst = std::max(worst, (fd - avg).norm());
  }
  return worst;
}

MidpointReport midpoint_bound_check(const TraceProfile& zeta_phi, const TraceProfile& zeta_psi,
                                    double h, double eps, double K, const Potential& w,
                                    const DistanceContext& ctx) {
  if (zeta_phi.s != zeta_psi.s)
    throw Error(ErrorKind::InvalidInput, "traces must share their sample points");
  if (!(h > eps && eps > 0.0)) throw Error(ErrorKind::InvalidInput, "need h > eps > 0");
  for (std::size_t k = 0; k < zeta_phi.size(); ++k) {
    if (std::abs(zeta_phi.s[k]) < h) continue;
    const Vec2 du = zeta_phi.u[k] - zeta_psi.u[k];
    if (du.norm() > 1e-8 * (1.0 + zeta_phi.u[k].norm()))
      throw Error(ErrorKind::HypothesisViolated, "u-traces differ outside (-h, h)");
  }
  MidpointReport rep;
  rep.alpha = alpha_K(w.wells(), K, ctx);
  const Curve zp = zeta_phi.zeta(), zq = zeta_psi.zeta();
  rep.I_phi = curve_energy_I_eps(zp, w, eps);
  rep.I_psi = curve_energy_I_eps(zq, w, eps);
  if (rep.I_phi >= K || rep.I_psi >= K)
    throw Error(ErrorKind::HypothesisViolated, "trace energy is not below K");
  const Mat2 A = w.wells().A();
  rep.s_phi = phase_separating_point(zp, rep.alpha, -A, A);
  rep.s_psi = phase_separating_point(zq, rep.alpha, -A, A);
  rep.distance = std::abs(rep.s_phi - rep.s_psi);
  rep.ratio = rep.distance / std::sqrt(h * eps * (1.0 + rep.I_phi + rep.I_psi));
  return rep;
}

}  // namespace dgmm
