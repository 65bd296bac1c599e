#include <algorithm>
#include <cmath>
#include <limits>

#include "dgmm/error.hpp"
#include "dgmm/glue.hpp"

namespace dgmm {

std::size_t select_balanced_index(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> c, double C_a, double C_b, double C_c,
                                  double tau) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n || c.size() != n)
    throw Error(ErrorKind::InvalidBounds, "sequences must be non-empty and of equal length");
  if (!(tau > 1.0)) throw Error(ErrorKind::InvalidBounds, "tau must exceed 1");
  auto check = [](std::span<const double> x, double C, const char* name) {
    double sum = 0.0;
    for (double v : x) {
      if (!(v >= 0.0)) throw Error(ErrorKind::InvalidBounds, std::string(name) + " has a negative entry");
      sum += v;
    }
    if (sum > C * (1.0 + 1e-12))
      throw Error(ErrorKind::InvalidBounds, std::string(name) + " exceeds its bound in sum");
  };
  check(a, C_a, "a");
  check(b, C_b, "b");
  check(c, C_c, "c");

  const double nd = static_cast<double>(n);
  const double ba = tau * C_a / nd;
  const double bb = 2.0 * tau * C_b / ((tau - 1.0) * nd);
  const double bc = 2.0 * tau * C_c / ((tau - 1.0) * nd);
  for (std::size_t k = 0; k < n; ++k)
    if (a[k] <= ba && b[k] <= bb && c[k] <= bc) return k;
  // The weighted-sum argument makes this unreachable for valid input.
  throw Error(ErrorKind::InvalidBounds, "no index satisfies the bounds");
}

TraceProfile extract_trace(const Field2D& u, int column) {
  const GridSpec& g = u.grid;
  if (column < 0 || column >= g.n1) throw Error(ErrorKind::InvalidInput, "trace column out of range");
  const GridOperators ops(g);
  const FieldDerivatives d = differentiate(u, ops, false);
  TraceProfile t;
  t.s.resize(static_cast<std::size_t>(g.n2));
  t.u.resize(t.s.size());
  t.d1u.resize(t.s.size());
  t.d2u.resize(t.s.size());
  for (int j = 0; j < g.n2; ++j) {
    const std::size_t k = g.index(column, j);
    const auto jj = static_cast<std::size_t>(j);
    t.s[jj] = g.x2(j);
    t.u[jj] = u.at(column, j);
    t.d1u[jj] = {d.d1[0][k], d.d1[1][k]};
    t.d2u[jj] = {d.d2[0][k], d.d2[1][k]};
  }
  return t;
}

TraceProfile flat_trace(const TraceProfile& t) {
  TraceProfile f = t;
  for (Vec2& v : f.d1u) v = {0.0, 0.0};
  return f;
}

namespace {

struct ColumnData {
  std::vector<double> energy;    // per-column integral of the energy density
  std::vector<double> distance;  // per-column integral of |grad u - grad u0|^2 + |u - u0|
};

ColumnData column_data(const Field2D& u, const Potential& w, double eps) {
  const GridSpec& g = u.grid;
  const GridOperators ops(g);
  const FieldDerivatives d = differentiate(u, ops, true);
  std::vector<double> wy(static_cast<std::size_t>(g.n2), g.h2);
  wy.front() = wy.back() = 0.5 * g.h2;
  const Vec2 a = w.wells().a();
  ColumnData cd;
  cd.energy.assign(static_cast<std::size_t>(g.n1), 0.0);
  cd.distance.assign(static_cast<std::size_t>(g.n1), 0.0);
  for (int j = 0; j < g.n2; ++j) {
    const double x2 = g.x2(j);
    const Vec2 u0 = a * std::abs(x2);
    const Mat2 grad0 = Mat2::from_columns({0.0, 0.0}, x2 >= 0.0 ? a : -a);
    const double wj = wy[static_cast<std::size_t>(j)];
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const Mat2 m = d.gradient(k);
      double hess = 0.0;
      for (int c = 0; c < 2; ++c)
        hess += d.h11[c][k] * d.h11[c][k] + 2.0 * d.h12[c][k] * d.h12[c][k] +
                d.h22[c][k] * d.h22[c][k];
      const auto ii = static_cast<std::size_t>(i);
      cd.energy[ii] += wj * (w(m) / eps + eps * hess);
      cd.distance[ii] += wj * ((m - grad0).norm2() + (u.at(i, j) - u0).norm());
    }
  }
  return cd;
}

// Signed coordinate measured so that the band always reads (1/2 - 2 delta, 1/2 - delta).
double oriented(double x1, Side side) { return side == Side::Right ? x1 : -x1; }

}  // namespace

SliceSelection select_trace_slice(const Field2D& u, const Potential& w, double eps, double delta,
                                  double tau, Side side, double K_ref) {
  if (!(tau > 1.0 && tau < 2.0)) throw Error(ErrorKind::InvalidInput, "tau must lie in (1, 2)");
  if (!(eps > 0.0 && delta > 0.0 && delta < 0.25 && K_ref > 0.0))
    throw Error(ErrorKind::InvalidInput, "need eps > 0, 0 < delta < 1/4, K_ref > 0");
  const GridSpec& g = u.grid;
  const double lo = 0.5 - 2.0 * delta, hi = 0.5 - delta;
  const double tol = 1e-9 * g.h1;

  // Band columns, ordered by the oriented coordinate.
  std::vector<int> cols;
  for (int i = 0; i < g.n1; ++i) {
    const double y = oriented(g.x1(i), side);
    if (y >= lo - tol && y < hi - tol) cols.push_back(i);
  }
  if (side == Side::Left) std::reverse(cols.begin(), cols.end());
  if (cols.size() < 2) throw Error(ErrorKind::NoSlice, "search band holds fewer than two columns");

  // The combinatorial step needs at least a few columns per subinterval.
  const int m_nominal = std::max(1, static_cast<int>(std::floor(1.0 / eps)));
  const int m = std::max(1, std::min(m_nominal, static_cast<int>(cols.size()) / 3));
  const double width = delta / m;

  const ColumnData cd = column_data(u, w, eps);
  std::vector<double> a(static_cast<std::size_t>(m), 0.0), dist(static_cast<std::size_t>(m), 0.0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
  double band = 0.0;
  for (int i : cols) {
    const double y = oriented(g.x1(i), side);
    int k = static_cast<int>(std::floor((y - lo) / width + 1e-9));
    k = std::clamp(k, 0, m - 1);
    const auto kk = static_cast<std::size_t>(k);
    const double e = g.h1 * cd.energy[static_cast<std::size_t>(i)];
    a[kk] += e;
    dist[kk] += g.h1 * cd.distance[static_cast<std::size_t>(i)];
    members[kk].push_back(i);
    band += e;
  }

  const double tau_t = 0.5 * (1.0 + tau);
  const double budget = tau_t * K_ref * delta;
  if (!(band < budget))
    throw Error(ErrorKind::BudgetExceeded, "band energy " + std::to_string(band) +
                                               " is not below " + std::to_string(budget));

  // Subintervals k = 2..m paired with their inner neighbour; a single subinterval is
  // taken as is.
  int k0 = 0;
  if (m >= 2) {
    std::vector<double> sa, sb, sc;
    for (int k = 1; k < m; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      sa.push_back(a[kk]);
      sb.push_back(a[kk] + a[kk - 1]);
      sc.push_back(dist[kk] + dist[kk - 1]);
    }
    double Cc = 0.0;
    for (double v : sc) Cc += v;
    const std::size_t pick = select_balanced_index(sa, sb, sc, budget, 2.0 * budget,
                                                   std::max(Cc, 1e-300), tau_t);
    k0 = static_cast<int>(pick) + 1;
  }

  // Candidates must leave room for the blend, which runs inwards from the slice.
  const double blend = m >= 2 ? width : 0.5 * delta;
  int best = -1;
  double best_e = std::numeric_limits<double>::infinity();
  for (int i : members[static_cast<std::size_t>(k0)]) {
    if (m < 2 && oriented(g.x1(i), side) < lo + blend - tol) continue;
    const double e = cd.energy[static_cast<std::size_t>(i)];
    if (e < best_e) best_e = e, best = i;
  }
  if (best < 0 || !(best_e < tau * K_ref))
    throw Error(ErrorKind::NoSlice, "no column in the chosen subinterval meets the trace bound");

  SliceSelection sel;
  sel.s_value = g.x1(best);
  sel.column = best;
  sel.trace = extract_trace(u, best);
  sel.trace_energy = best_e;
  sel.interval_index = k0 + 1;
  sel.intervals = m;
  sel.band_energy = band;
  sel.budget = budget;
  return sel;
}

Field2D modify_horizontal(const Field2D& u, const Potential& w, double eps, double delta,
                          double tau, double K_ref, HorizontalReport* report) {
  const GridSpec& g = u.grid;
  if (g.periodic_x1) throw Error(ErrorKind::InvalidInput, "modify_horizontal needs a non-periodic grid");
  if (std::abs(g.x1_lo + 0.5) > 1e-9 || std::abs(g.x1_hi() - 0.5) > 1e-9)
    throw Error(ErrorKind::InvalidInput, "x1 nodes must span [-1/2, 1/2]");
  const int n_ext = std::max(1, static_cast<int>(std::lround(delta / g.h1)));
  const double d = n_ext * g.h1;

  const SliceSelection right = select_trace_slice(u, w, eps, d, tau, Side::Right, K_ref);
  const SliceSelection left = select_trace_slice(u, w, eps, d, tau, Side::Left, K_ref);

  GridSpec gw = g;
  gw.n1 = g.n1 + 2 * n_ext;
  gw.x1_lo = g.x1_lo - d;
  Field2D out = Field2D::zeros(gw);

  auto blend_width = [&](const SliceSelection& s) {
    return s.intervals >= 2 ? d / s.intervals : 0.5 * d;
  };
  const double bw_r = blend_width(right), bw_l = blend_width(left);
  const CutoffProfile phi_r(right.s_value - 0.5 * bw_r, bw_r, 0.0, 1.0);
  const CutoffProfile phi_l(left.s_value + 0.5 * bw_l, bw_l, 1.0, 0.0);

  for (int iw = 0; iw < gw.n1; ++iw) {
    const int i = iw - n_ext;  // column of u, possibly outside
    const double x1 = g.x1_lo + g.h1 * i;
    for (int j = 0; j < gw.n2; ++j) {
      Vec2 v;
      if (i >= right.column) {
        v = u.at(right.column, j);
      } else if (i <= left.column) {
        v = u.at(left.column, j);
      } else {
        const double pr = phi_r.value(x1), pl = phi_l.value(x1);
        if (pr == 0.0 && pl == 0.0) {
          v = u.at(i, j);
        } else if (pr > 0.0) {
          v = u.at(right.column, j) * pr + u.at(i, j) * (1.0 - pr);
        } else {
          v = u.at(left.column, j) * pl + u.at(i, j) * (1.0 - pl);
        }
      }
      out.set(iw, j, v);
    }
  }

  if (report) {
    report->delta = d;
    report->left = left;
    report->right = right;
    const double y_lo = gw.x2_lo, y_hi = gw.x2_hi();
    const std::vector<Region> parts{
        {"band_left", -0.5, -0.5 + 2.0 * d, y_lo, y_hi},
        {"band_right", 0.5 - 2.0 * d, 0.5, y_lo, y_hi},
        {"outer_left", -0.5 - d, -0.5, y_lo, y_hi},
        {"outer_right", 0.5, 0.5 + d, y_lo, y_hi},
    };
    const EnergyReport er = energy_E_eps(out, w, eps, nullptr, parts);
    report->band_energy = er.regions[0].total + er.regions[1].total;
    report->outer_energy = er.regions[2].total + er.regions[3].total;
    report->total_energy = er.total;
    report->input_energy = energy_E_eps(u, w, eps).total;
  }
  return out;
}

}  // namespace dgmm
