#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "dgmm/error.hpp"
#include "dgmm/glue.hpp"

namespace dgmm {

// ---------------------------------------------------------------------------
// Antiderivative of the second gradient column.

TraceAntiderivative::TraceAntiderivative(const TraceProfile& t, double lower_limit) : t_(t) {
  if (t_.size() < 2 || t_.u.size() != t_.size() || t_.d1u.size() != t_.size() ||
      t_.d2u.size() != t_.size())
    throw Error(ErrorKind::InvalidInput, "trace needs at least two consistent samples");
  for (std::size_t k = 1; k < t_.size(); ++k)
    if (!(t_.s[k] > t_.s[k - 1])) throw Error(ErrorKind::InvalidInput, "trace nodes must increase");
  offset_ = raw(lower_limit);
}

std::size_t TraceAntiderivative::segment(double x) const {
  const auto it = std::upper_bound(t_.s.begin(), t_.s.end(), x);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - t_.s.begin() - 1));
  return std::min(k, t_.size() - 2);
}

Vec2 TraceAntiderivative::raw(double x) const {
  const std::size_t n = t_.size();
  if (x <= t_.s.front()) return t_.u.front() + t_.d2u.front() * (x - t_.s.front());
  if (x >= t_.s.back()) return t_.u.back() + t_.d2u.back() * (x - t_.s.back());
  const std::size_t k = segment(x);
  const double h = t_.s[k + 1] - t_.s[k];
  const double t = (x - t_.s[k]) / h;
  if (t == 0.0) return t_.u[k];
  if (k + 1 == n - 1 && t == 1.0) return t_.u[k + 1];
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return t_.u[k] * h00 + t_.d2u[k] * (h * h10) + t_.u[k + 1] * h01 + t_.d2u[k + 1] * (h * h11);
}

Vec2 TraceAntiderivative::value(double x2) const { return raw(x2) - offset_; }

Vec2 TraceAntiderivative::slope(double x) const {
  if (x <= t_.s.front()) return t_.d2u.front();
  if (x >= t_.s.back()) return t_.d2u.back();
  const std::size_t k = segment(x);
  const double h = t_.s[k + 1] - t_.s[k];
  const double t = (x - t_.s[k]) / h;
  if (t == 0.0) return t_.d2u[k];
  const double t2 = t * t;
  const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
  return t_.u[k] * d00 + t_.d2u[k] * d10 + t_.u[k + 1] * d01 + t_.d2u[k + 1] * d11;
}

Vec2 TraceAntiderivative::first_column(double x) const {
  if (x <= t_.s.front()) return t_.d1u.front();
  if (x >= t_.s.back()) return t_.d1u.back();
  const std::size_t k = segment(x);
  const double t = (x - t_.s[k]) / (t_.s[k + 1] - t_.s[k]);
  return t_.d1u[k] * (1.0 - t) + t_.d1u[k + 1] * t;
}

TraceProfile shift_trace(const TraceProfile& t, double beta) {
  const TraceAntiderivative F(t);
  TraceProfile out;
  out.s = t.s;
  out.u.resize(t.size());
  out.d1u.resize(t.size());
  out.d2u.resize(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double x = t.s[k] + beta;
    out.u[k] = F.value(x) + t.u.front() - F.value(t.s.front());
    out.d1u[k] = F.first_column(x);
    out.d2u[k] = F.slope(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared construction helpers.

namespace {

GridSpec interpolant_grid(const TraceProfile& t, double halfwidth, double h1, int multiple) {
  if (t.size() < 4) throw Error(ErrorKind::InvalidInput, "trace needs at least four samples");
  const double h2 = t.s[1] - t.s[0];
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t.s[k] - t.s[k - 1] - h2) > 1e-9 * h2)
      throw Error(ErrorKind::InvalidInput, "trace nodes must be uniform");
  if (h1 <= 0.0) h1 = h2;
  const double steps = 2.0 * halfwidth / h1;
  const long n = std::lround(steps);
  if (n < 2 * multiple || std::abs(steps - static_cast<double>(n)) > 1e-6 || n % multiple != 0)
    throw Error(ErrorKind::InvalidInput, "halfwidth must be a multiple of the x1 spacing");
  GridSpec g;
  g.n1 = static_cast<int>(n) + 1;
  g.n2 = static_cast<int>(t.size());
  g.x1_lo = -halfwidth;
  g.x2_lo = t.s.front();
  g.h1 = 2.0 * halfwidth / static_cast<double>(n);
  g.h2 = h2;
  g.periodic_x1 = false;
  return g;
}

Field2D fill(const GridSpec& g, const std::function<Vec2(int, int)>& f) {
  Field2D out = Field2D::zeros(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out.set(i, j, f(i, j));
  return out;
}

// Max |d1| over columns whose x1 stencil only touches columns where `flat` holds.
void flatness(const Field2D& u, const std::function<bool(int)>& flat, InterpolantReport& rep) {
  const GridSpec& g = u.grid;
  const GridOperators ops(g);
  const FieldDerivatives d = differentiate(u, ops, false);
  rep.flatness = 0.0;
  rep.flat_columns = 0;
  for (int i = 0; i < g.n1; ++i) {
    const int lo = i == 0 ? 0 : i == g.n1 - 1 ? g.n1 - 3 : i - 1;
    const int hi = i == 0 ? 2 : i == g.n1 - 1 ? g.n1 - 1 : i + 1;
    bool ok = true;
    for (int k = lo; k <= hi; ++k) ok = ok && flat(k);
    if (!ok) continue;
    ++rep.flat_columns;
    for (int j = 0; j < g.n2; ++j) {
      const std::size_t k = g.index(i, j);
      rep.flatness = std::max({rep.flatness, std::abs(d.d1[0][k]), std::abs(d.d1[1][k])});
    }
  }
}

double column_error(const Field2D& u, int i, const std::function<Vec2(int)>& target) {
  double e = 0.0;
  for (int j = 0; j < u.grid.n2; ++j) e = std::max(e, (u.at(i, j) - target(j)).norm());
  return e;
}

struct PairCheck {
  double s_phi, s_psi, I_phi, I_psi;
};

// Hypotheses shared by the same-midpoint construction: wells beyond the tail, energies
// below K < 3d, matching separating points.
PairCheck check_pair(const TraceProfile& phi, const TraceProfile& psi, double eps, double tail,
                     double K, const Potential& w, const DistanceContext& ctx, double s_tol) {
  if (phi.s != psi.s) throw Error(ErrorKind::InvalidInput, "traces must share their sample points");
  const Mat2 A = w.wells().A();
  const double alpha = alpha_K(w.wells(), K, ctx);
  for (const TraceProfile* t : {&phi, &psi}) {
    for (std::size_t k = 0; k < t->size(); ++k) {
      if (std::abs(t->s[k]) < tail) continue;
      const Mat2 target = t->s[k] > 0.0 ? A : -A;
      if ((Mat2::from_columns(t->d1u[k], t->d2u[k]) - target).norm() > 1e-6)
        throw Error(ErrorKind::HypothesisViolated, "trace is not at a well beyond the tail");
    }
  }
  PairCheck pc{};
  pc.I_phi = curve_energy_I_eps(phi.zeta(), w, eps);
  pc.I_psi = curve_energy_I_eps(psi.zeta(), w, eps);
  if (!(pc.I_phi < K && pc.I_psi < K))
    throw Error(ErrorKind::HypothesisViolated, "trace energy is not below K");
  pc.s_phi = phase_separating_point(phi.zeta(), alpha, -A, A);
  pc.s_psi = phase_separating_point(psi.zeta(), alpha, -A, A);
  if (std::abs(pc.s_phi - pc.s_psi) > s_tol)
    throw Error(ErrorKind::MidpointMismatch,
                "separating points differ by " + std::to_string(std::abs(pc.s_phi - pc.s_psi)));
  return pc;
}

}  // namespace

// ---------------------------------------------------------------------------

Field2D build_translation_interpolant(const TraceProfile& phi, double beta, double halfwidth,
                                      double eps, double h1, InterpolantReport* report) {
  if (!(std::abs(beta) < 1.0)) throw Error(ErrorKind::BetaOutOfRange, "|beta| must be below 1");
  if (!(halfwidth > eps && eps > 0.0)) throw Error(ErrorKind::InvalidInput, "need halfwidth > eps > 0");
  const GridSpec g = interpolant_grid(phi, halfwidth, h1, 1);
  const TraceAntiderivative F(phi);
  const CutoffProfile rho(0.0, halfwidth, 0.0, beta);
  const Field2D out =
      fill(g, [&](int i, int j) { return F.value(g.x2(j) + rho.value(g.x1(i))); });
  if (report) {
    *report = {};
    report->beta = beta;
    report->left_trace_error = column_error(out, 0, [&](int j) { return F.value(g.x2(j)); });
    report->right_trace_error =
        column_error(out, g.n1 - 1, [&](int j) { return F.value(g.x2(j) + beta); });
    flatness(out, [&](int i) { return rho.d1(g.x1(i)) == 0.0 && rho.d2(g.x1(i)) == 0.0; },
             *report);
  }
  return out;
}

Field2D build_same_midpoint_interpolant(const TraceProfile& phi, const TraceProfile& psi,
                                        double halfwidth, double eps, double h, double K,
                                        const Potential& w, const DistanceContext& ctx, double h1,
                                        InterpolantReport* report) {
  if (!(halfwidth > eps && eps > 0.0)) throw Error(ErrorKind::InvalidInput, "need halfwidth > eps > 0");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "h must be positive");
  const double s_tol = phi.s.size() > 1 ? phi.s[1] - phi.s[0] : 0.0;
  const PairCheck pc = check_pair(phi, psi, eps, h, K, w, ctx, s_tol);
  const GridSpec g = interpolant_grid(phi, halfwidth, h1, 1);
  const TraceAntiderivative Fp(phi), Fq(psi);
  const CutoffProfile rho(0.0, halfwidth, 0.0, 1.0);
  const Field2D out = fill(g, [&](int i, int j) {
    const double r = rho.value(g.x1(i));
    if (r == 0.0) return Fp.value(g.x2(j));
    if (r == 1.0) return Fq.value(g.x2(j));
    return Fp.value(g.x2(j)) * (1.0 - r) + Fq.value(g.x2(j)) * r;
  });
  if (report) {
    *report = {};
    report->s_phi = pc.s_phi;
    report->s_psi = pc.s_psi;
    report->left_trace_error = column_error(out, 0, [&](int j) { return Fp.value(g.x2(j)); });
    report->right_trace_error =
        column_error(out, g.n1 - 1, [&](int j) { return Fq.value(g.x2(j)); });
    flatness(out, [&](int i) { return rho.d1(g.x1(i)) == 0.0 && rho.d2(g.x1(i)) == 0.0; },
             *report);
  }
  return out;
}

Field2D build_combined_interpolant(const TraceProfile& phi, const TraceProfile& psi,
                                   double halfwidth, double eps, double h, double h_tilde,
                                   double K, const Potential& w, const DistanceContext& ctx,
                                   double h1, InterpolantReport* report) {
  if (!(eps > 0.0 && h > eps)) throw Error(ErrorKind::InvalidInput, "need h > eps > 0");
  if (phi.s != psi.s) throw Error(ErrorKind::InvalidInput, "traces must share their sample points");
  // Separating points of the unshifted traces; the midpoint tolerance is irrelevant here.
  const PairCheck pc = check_pair(phi, psi, eps, h, K, w, ctx, 2.0);
  const double gap = std::abs(pc.s_phi - pc.s_psi);
  if (!(gap < h_tilde * std::sqrt(eps)))
    throw Error(ErrorKind::MidpointTooFar, "|s_phi - s_psi| = " + std::to_string(gap) +
                                               " is not below h~ sqrt(eps)");
  const double beta = pc.s_phi - pc.s_psi;
  if (!(std::abs(beta) < 1.0)) throw Error(ErrorKind::BetaOutOfRange, "|beta| must be below 1");

  // The shifted trace must match psi's separating point; the same-midpoint step runs with
  // the doubled tail 2h.
  const TraceProfile zeta = shift_trace(phi, beta);
  const double s_tol = phi.s[1] - phi.s[0];
  check_pair(zeta, psi, eps, 2.0 * h, K, w, ctx, s_tol);

  const GridSpec g = interpolant_grid(phi, halfwidth, h1, 2);
  const int mid = (g.n1 - 1) / 2;
  const TraceAntiderivative Fp(phi), Fq(psi);
  const Vec2 offset = Fp.value(-0.5 + beta);
  const CutoffProfile rho(-0.5 * halfwidth, 0.5 * halfwidth, 0.0, beta);
  const CutoffProfile rho_t(0.5 * halfwidth, 0.5 * halfwidth, 0.0, 1.0);

  auto left = [&](int i, int j) { return Fp.value(g.x2(j) + rho.value(g.x1(i))); };
  auto right = [&](int i, int j) {
    const double r = rho_t.value(g.x1(i));
    const Vec2 a = Fp.value(g.x2(j) + beta);
    const Vec2 b = Fq.value(g.x2(j)) + offset;
    if (r == 0.0) return a;
    if (r == 1.0) return b;
    return a * (1.0 - r) + b * r;
  };
  const Field2D out = fill(g, [&](int i, int j) { return i <= mid ? left(i, j) : right(i, j); });

  if (report) {
    *report = {};
    report->beta = beta;
    report->s_phi = pc.s_phi;
    report->s_psi = pc.s_psi;
    report->offset = offset.norm();
    report->doubled_tail = true;
    report->left_trace_error = column_error(out, 0, [&](int j) { return Fp.value(g.x2(j)); });
    report->right_trace_error =
        column_error(out, g.n1 - 1, [&](int j) { return Fq.value(g.x2(j)) + offset; });
    double jump = 0.0;
    for (int j = 0; j < g.n2; ++j) jump = std::max(jump, (left(mid, j) - right(mid, j)).norm());
    report->junction_jump = jump;
    // One-sided x1 derivatives from either half at the junction column.
    double gj = 0.0;
    if (mid >= 2) {
      for (int j = 0; j < g.n2; ++j) {
        const Vec2 dl = (left(mid, j) * 3.0 - left(mid - 1, j) * 4.0 + left(mid - 2, j)) *
                        (0.5 / g.h1);
        const Vec2 dr = (right(mid, j) * -3.0 + right(mid + 1, j) * 4.0 - right(mid + 2, j)) *
                        (0.5 / g.h1);
        gj = std::max(gj, (dl - dr).norm());
      }
    }
    report->junction_gradient_jump = gj;
    flatness(out,
             [&](int i) {
               const double x = g.x1(i);
               return rho.d1(x) == 0.0 && rho.d2(x) == 0.0 && rho_t.d1(x) == 0.0 &&
                      rho_t.d2(x) == 0.0 && (x <= -0.75 * halfwidth || x >= 0.75 * halfwidth);
             },
             *report);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic traces.

std::vector<double> uniform_nodes(double lo, double hi, int n) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "need at least two nodes");
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) s[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return s;
}

namespace {

constexpr double kPi = std::numbers::pi;

// T(x) = sin(pi (x - c) / (2 w)) clamped to +-1, and its integral from -1/2.
double transition(double x, double c, double w) {
  const double t = (x - c) / w;
  if (t <= -1.0) return -1.0;
  if (t >= 1.0) return 1.0;
  return std::sin(0.5 * kPi * t);
}

double transition_integral(double x, double c, double w) {
  const double base = -(c - w + 0.5);
  if (x <= c - w) return -(x + 0.5);
  if (x >= c + w) return base + (x - c - w);
  return base - (2.0 * w / kPi) * std::cos(0.5 * kPi * (x - c) / w);
}

double bump(double x, double m, double l) {
  const double t = (x - m) / l;
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q;
}

double bump_integral(double x, double m, double l) {
  const double t = std::clamp((x - m) / l, -1.0, 1.0);
  return l * (t - 2.0 * t * t * t / 3.0 + t * t * t * t * t / 5.0 + 8.0 / 15.0);
}

}  // namespace

TraceProfile sine_transition_trace(const std::vector<double>& s, const WellPair& wells,
                                   double center, double width, double kappa) {
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidInput, "width must be positive");
  const Vec2 a = wells.a();
  TraceProfile t;
  t.s = s;
  for (double x : s) {
    t.u.push_back(a * transition_integral(x, center, width));
    t.d2u.push_back(a * transition(x, center, width));
    t.d1u.push_back({kappa * bump(x, center, width), 0.0});
  }
  return t;
}

TraceProfile shifted_compensated_trace(const std::vector<double>& s, const WellPair& wells,
                                       double width, double shift, double bump_center,
                                       double bump_half) {
  if (!(width > 0.0 && bump_half > 0.0)) throw Error(ErrorKind::InvalidInput, "widths must be positive");
  if (bump_center - bump_half < std::abs(shift) + width)
    throw Error(ErrorKind::InvalidInput, "bump overlaps the transition");
  // Shifting the transition by c changes the flux by -2c; the bump repays it.
  const double kappa = 15.0 * shift / (8.0 * bump_half);
  const Vec2 a = wells.a();
  TraceProfile t;
  t.s = s;
  for (double x : s) {
    t.u.push_back(a * (transition_integral(x, shift, width) +
                       kappa * bump_integral(x, bump_center, bump_half)));
    t.d2u.push_back(a * (transition(x, shift, width) + kappa * bump(x, bump_center, bump_half)));
    t.d1u.push_back({0.0, 0.0});
  }
  return t;
}

}  // namespace dgmm
