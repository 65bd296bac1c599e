#include "dgmm/cell2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dgmm/error.hpp"
#include "dgmm/lbfgs.hpp"
#include "dgmm/profile1d.hpp"

namespace dgmm {

namespace {

constexpr double kStripEdge = 0.25;

bool is_upper(const GridSpec& g, int j) { return g.x2(j) >= kStripEdge - 1e-12; }
bool is_lower(const GridSpec& g, int j) { return g.x2(j) <= -kStripEdge + 1e-12; }

Vec2 lower_offset_of(const Field2D& u, const WellPair& wells) {
  // u = -a x2 + c on the lower strip, read off at the bottom row.
  return u.at(0, 0) + wells.a() * u.grid.x2(0);
}

void pin_strips(Field2D& u, const WellPair& wells, const Vec2& c) {
  const GridSpec& g = u.grid;
  const Vec2 a = wells.a();
  for (int j = 0; j < g.n2; ++j) {
    if (is_upper(g, j)) {
      for (int i = 0; i < g.n1; ++i) u.set(i, j, a * g.x2(j));
    } else if (is_lower(g, j)) {
      for (int i = 0; i < g.n1; ++i) u.set(i, j, c - a * g.x2(j));
    }
  }
}

}  // namespace

GridSpec cell_grid(const CellGrid& spec) {
  if (spec.n1 < 32 || spec.n2 < 32)
    throw Error(ErrorKind::InvalidInput, "cell grid must be at least 32 x 32");
  return GridSpec::make(spec.n1, spec.n2, -0.5, 0.5, -0.5, 0.5, true);
}

bool is_pinned_row(const GridSpec& g, int j) { return is_upper(g, j) || is_lower(g, j); }

double strip_violation(const Field2D& u, const WellPair& wells) {
  const GridSpec& g = u.grid;
  const GridOperators ops(g);
  const FieldDerivatives d = differentiate(u, ops, false);
  const Mat2 A = wells.A();
  double worst = 0.0;
  for (int j = 0; j < g.n2; ++j) {
    bool inner = true;
    for (int k = std::max(0, j - 2); k <= std::min(g.n2 - 1, j + 2); ++k)
      inner = inner && (is_upper(g, j) ? is_upper(g, k) : is_lower(g, j) && is_lower(g, k));
    if (!inner) continue;
    const Mat2 target = is_upper(g, j) ? A : -A;
    for (int i = 0; i < g.n1; ++i)
      worst = std::max(worst, (d.gradient(g.index(i, j)) - target).norm());
  }
  return worst;
}

double cell_energy(double E_W, double E_H, double scale_L) {
  if (!(scale_L > 0.0)) throw Error(ErrorKind::InvalidInput, "scale_L must be positive");
  return scale_L * E_W + E_H / scale_L;
}

double cell_energy(const Field2D& u, double scale_L, const Potential& w, double tol) {
  const double v = strip_violation(u, w.wells());
  if (v > tol) throw Error(ErrorKind::BoundaryViolation, "strip gradient differs from the wells");
  const EnergyTerms t = energy_terms(u, w);
  return cell_energy(t.E_W, t.E_H, scale_L);
}

OptimalScale optimal_scale(double E_W, double E_H) {
  if (!(E_W > 0.0)) throw Error(ErrorKind::DegenerateField, "potential energy vanishes");
  return {std::sqrt(E_H / E_W), 2.0 * std::sqrt(E_W * E_H)};
}

OptimalScale optimal_scale(const Field2D& u, const Potential& w) {
  const EnergyTerms t = energy_terms(u, w);
  return optimal_scale(t.E_W, t.E_H);
}

Field2D default_cell_init(const Potential& w, const GridSpec& g, const CellInitOptions& opts) {
  const Profile1D p = solve_profile_1d(w, opts.profile_half_len, opts.profile_points);
  const ProfileAntiderivative U = profile_antiderivative(p, w.wells());
  const double lam = kStripEdge / opts.profile_half_len;
  const Vec2 a = w.wells().a();
  // Match u = a x2 at the upper strip edge.
  const Vec2 shift = a * kStripEdge - U.value(opts.profile_half_len) * lam;
  Field2D u = Field2D::zeros(g);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const double p1 = ph(rng), p2 = ph(rng);
  for (int j = 0; j < g.n2; ++j) {
    const double x2 = g.x2(j);
    const Vec2 base = U.value(x2 / lam) * lam + shift;
    for (int i = 0; i < g.n1; ++i) {
      Vec2 v = base;
      if (opts.ripple != 0.0 && !is_pinned_row(g, j)) {
        const double x1 = g.x1(i);
        const double c = std::cos(2.0 * std::numbers::pi * x2);
        const double env = opts.ripple * c * c;
        v = v + Vec2{std::sin(2.0 * std::numbers::pi * x1 + p1),
                     std::sin(4.0 * std::numbers::pi * x1 + p2)} * env;
      }
      u.set(i, j, v);
    }
  }
  pin_strips(u, w.wells(), lower_offset_of(u, w.wells()));
  return u;
}

CellSolution evaluate_cell(const Field2D& u, const Potential& w) {
  CellSolution s;
  s.field = u;
  const EnergyTerms t = energy_terms(u, w);
  s.E_W = t.E_W;
  s.E_H = t.E_H;
  const OptimalScale o = optimal_scale(t.E_W, t.E_H);
  s.scale_L = o.scale_L;
  s.energy = o.energy;
  s.lower_offset = lower_offset_of(u, w.wells());
  return s;
}

CellSolution solve_cell(const Potential& w, const CellGrid& grid, const std::optional<Field2D>& init,
                        const CellSolveOptions& opts) {
  const GridSpec g = cell_grid(grid);
  const WellPair& wells = w.wells();
  Field2D u = init ? *init : default_cell_init(w, g, opts.init);
  if (u.grid.n1 != g.n1 || u.grid.n2 != g.n2 || !u.grid.periodic_x1)
    throw Error(ErrorKind::InvalidInput, "initial field does not match the cell grid");
  Vec2 c = lower_offset_of(u, wells);
  pin_strips(u, wells, c);
  if (strip_violation(u, wells) > 1e-8)
    throw Error(ErrorKind::BoundaryViolation, "initial field violates the strip condition");

  std::vector<int> free_rows, lower_rows;
  for (int j = 0; j < g.n2; ++j) {
    if (!is_pinned_row(g, j)) free_rows.push_back(j);
    if (is_lower(g, j)) lower_rows.push_back(j);
  }
  const std::size_t n1 = static_cast<std::size_t>(g.n1);
  const std::size_t nvar = 2 * n1 * free_rows.size() + 2;

  auto load = [&](std::span<const double> x, Field2D& f) {
    std::size_t k = 0;
    for (int j : free_rows)
      for (int i = 0; i < g.n1; ++i, k += 2) f.set(i, j, {x[k], x[k + 1]});
    pin_strips(f, wells, {x[nvar - 2], x[nvar - 1]});
  };
  std::vector<double> x(nvar);
  {
    std::size_t k = 0;
    for (int j : free_rows)
      for (int i = 0; i < g.n1; ++i, k += 2) {
        const Vec2 v = u.at(i, j);
        x[k] = v.x, x[k + 1] = v.y;
      }
    x[nvar - 2] = c.x, x[nvar - 1] = c.y;
  }

  const GridOperators ops(g);
  const std::vector<double> weights = quadrature_weights(g);
  Field2D work = u, gW, gH;
  Objective f = [&](std::span<const double> xs, std::span<double> gx) {
    load(xs, work);
    const EnergyTerms t = energy_terms(work, w, ops, weights, &gW, &gH);
    if (!(t.E_W > 0.0) || !(t.E_H > 0.0)) {
      std::fill(gx.begin(), gx.end(), 0.0);
      return 2.0 * std::sqrt(std::max(0.0, t.E_W * t.E_H));
    }
    const double L = std::sqrt(t.E_H / t.E_W);
    std::size_t k = 0;
    for (int j : free_rows)
      for (int i = 0; i < g.n1; ++i, k += 2) {
        const std::size_t idx = g.index(i, j);
        gx[k] = L * gW.u1[idx] + gH.u1[idx] / L;
        gx[k + 1] = L * gW.u2[idx] + gH.u2[idx] / L;
      }
    double c1 = 0.0, c2 = 0.0;
    for (int j : lower_rows)
      for (int i = 0; i < g.n1; ++i) {
        const std::size_t idx = g.index(i, j);
        c1 += L * gW.u1[idx] + gH.u1[idx] / L;
        c2 += L * gW.u2[idx] + gH.u2[idx] / L;
      }
    gx[nvar - 2] = c1;
    gx[nvar - 1] = c2;
    return 2.0 * std::sqrt(t.E_W * t.E_H);
  };

  LbfgsOptions lo;
  lo.max_iterations = opts.max_iterations;
  lo.rel_tol = opts.rel_tol;
  lo.window = opts.window;
  lo.grad_tol = 1e-14;
  const LbfgsResult r = lbfgs_minimize(f, x, lo);
  if (!r.converged) throw Error(ErrorKind::NoConvergence, "cell solver hit the iteration limit");
  load(x, u);
  CellSolution sol = evaluate_cell(u, w);
  sol.iterations = r.iterations;
  return sol;
}

Field2D rescale_to_strip(const CellSolution& cell, double eps, const WellPair& wells,
                         int margin_rows) {
  const double s = eps * cell.scale_L;
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  if (s > 1.0 + 1e-12) throw Error(ErrorKind::LayerTooWide, "eps L exceeds 1");
  const GridSpec& g = cell.field.grid;
  const Vec2 a = wells.a();
  const Vec2 c = cell.lower_offset;

  // Margin rows stay inside |y2| <= 1/2.
  int m = 0;
  while (m < margin_rows && s * (g.x2_hi() + (m + 1) * g.h2) <= 0.5 + 1e-12) ++m;
  const double t = 1e-9;
  const long i_lo = static_cast<long>(std::ceil((-0.5 / s - g.x1_lo) / g.h1 - t));
  const long i_hi = static_cast<long>(std::floor((0.5 / s - g.x1_lo) / g.h1 + t));

  GridSpec z;
  z.n1 = static_cast<int>(i_hi - i_lo + 1);
  z.n2 = g.n2 + 2 * m;
  z.h1 = s * g.h1;
  z.h2 = s * g.h2;
  z.x1_lo = s * (g.x1_lo + g.h1 * static_cast<double>(i_lo));
  z.x2_lo = s * (g.x2_lo - g.h2 * m);
  z.periodic_x1 = false;
  if (z.n1 < 4) throw Error(ErrorKind::LayerTooWide, "too few columns after rescaling");

  Field2D out = Field2D::zeros(z);
  for (int jz = 0; jz < z.n2; ++jz) {
    const int j = jz - m;
    const double x2 = g.x2_lo + g.h2 * j;
    for (int iz = 0; iz < z.n1; ++iz) {
      Vec2 v;
      if (j >= 0 && j < g.n2) {
        const long ic = ((i_lo + iz) % g.n1 + g.n1) % g.n1;
        v = cell.field.at(static_cast<int>(ic), j);
      } else if (j >= g.n2) {
        v = a * x2;
      } else {
        v = c - a * x2;
      }
      out.set(iz, jz, v * s);
    }
  }
  return out;
}

double strip_energy_per_length(const Field2D& z, const Potential& w, double eps) {
  const EnergyReport r = energy_E_eps(z, w, eps);
  const double len = z.grid.periodic_x1 ? z.grid.h1 * z.grid.n1 : z.grid.h1 * (z.grid.n1 - 1);
  return r.total / len;
}

RiemannLebesgueReport riemann_lebesgue_check(const CellSolution& cell, const Potential& w,
                                             std::vector<double> eps_seq) {
  if (eps_seq.empty())
    for (double f : {0.5, 0.25, 0.125, 0.0625}) eps_seq.push_back(f / cell.scale_L);
  RiemannLebesgueReport rep;
  rep.cell_energy = cell.energy;
  for (double eps : eps_seq) {
    const Field2D z = rescale_to_strip(cell, eps, w.wells());
    const double e = strip_energy_per_length(z, w, eps);
    rep.entries.push_back({eps, e, std::abs(e - cell.energy) / cell.energy});
  }
  if (rep.entries.size() >= 2) {
    rep.gaps_decreasing = true;
    for (std::size_t k = 1; k < rep.entries.size(); ++k)
      if (rep.entries[k].gap > rep.entries[k - 1].gap + 1e-12) rep.gaps_decreasing = false;
  }
  return rep;
}

}  // namespace dgmm
