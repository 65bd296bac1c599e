#include "dgmm/energy.hpp"

#include <cmath>

#include "dgmm/error.hpp"
#include "dgmm/simd/kernels.hpp"

namespace dgmm {

namespace {

// Trapezoid weights for nodes lo..hi on a uniform line of n nodes.
void line_weights(int n, double h, bool periodic, double lo_x, double hi_x, double x0,
                  bool full, std::vector<double>& w) {
  w.assign(static_cast<std::size_t>(n), 0.0);
  if (periodic && full) {
    for (double& v : w) v = h;
    return;
  }
  int lo = 0, hi = n - 1;
  if (!full) {
    lo = static_cast<int>(std::ceil((lo_x - x0) / h - 1e-9));
    hi = static_cast<int>(std::floor((hi_x - x0) / h + 1e-9));
    lo = std::max(lo, 0);
    hi = std::min(hi, n - 1);
  }
  if (hi < lo) return;
  if (hi == lo) return;  // a single node carries no area
  for (int i = lo; i <= hi; ++i) w[static_cast<std::size_t>(i)] = h;
  w[static_cast<std::size_t>(lo)] = 0.5 * h;
  w[static_cast<std::size_t>(hi)] = 0.5 * h;
}

}  // namespace

std::vector<double> quadrature_weights(const GridSpec& g, const Region* region) {
  std::vector<double> wx, wy;
  if (region) {
    const bool full_x = g.periodic_x1 && region->x1_lo <= g.x1_lo + 1e-12 &&
                        region->x1_hi >= g.x1_hi() - 1e-12;
    line_weights(g.n1, g.h1, g.periodic_x1, region->x1_lo, region->x1_hi, g.x1_lo, full_x, wx);
    line_weights(g.n2, g.h2, false, region->x2_lo, region->x2_hi, g.x2_lo, false, wy);
  } else {
    line_weights(g.n1, g.h1, g.periodic_x1, 0, 0, g.x1_lo, true, wx);
    line_weights(g.n2, g.h2, false, 0, 0, g.x2_lo, true, wy);
  }
  std::vector<double> w(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      w[g.index(i, j)] = wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(j)];
  return w;
}

EnergyTerms energy_terms(const Field2D& u, const Potential& w, const GridOperators& ops,
                         const std::vector<double>& weights, Field2D* grad_W, Field2D* grad_H) {
  const GridSpec& g = u.grid;
  const std::size_t n = g.size();
  if (weights.size() != n) throw Error(ErrorKind::InvalidInput, "weight array size mismatch");
  const FieldDerivatives d = differentiate(u, ops, true);
  EnergyTerms t;

  std::vector<double> g11, g12, g21, g22;
  if (grad_W) g11.resize(n), g12.resize(n), g21.resize(n), g22.resize(n);
  if (auto factor = w.w0_factor()) {
    simd::W0Batch b{d.d1[0].data(), d.d2[0].data(), d.d1[1].data(), d.d2[1].data(),
                    weights.data(), n, w.wells().a().x, w.wells().a().y, *factor};
    if (grad_W) b.g11 = g11.data(), b.g12 = g12.data(), b.g21 = g21.data(), b.g22 = g22.data();
    t.E_W = simd::w0_energy(b);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (weights[k] == 0.0) {
        if (grad_W) g11[k] = g12[k] = g21[k] = g22[k] = 0.0;
        continue;
      }
      const Mat2 m = d.gradient(k);
      t.E_W += weights[k] * w(m);
      if (grad_W) {
        const Mat2 gm = w.gradient(m) * weights[k];
        g11[k] = gm.m11, g12[k] = gm.m12, g21[k] = gm.m21, g22[k] = gm.m22;
      }
    }
  }

  std::array<std::vector<double>, 2> o11, o12, o22;
  simd::HessianBatch hb{};
  for (int c = 0; c < 2; ++c) {
    hb.h11[c] = d.h11[c].data();
    hb.h12[c] = d.h12[c].data();
    hb.h22[c] = d.h22[c].data();
    if (grad_H) {
      o11[c].resize(n), o12[c].resize(n), o22[c].resize(n);
      hb.o11[c] = o11[c].data(), hb.o12[c] = o12[c].data(), hb.o22[c] = o22[c].data();
    }
  }
  hb.weight = weights.data();
  hb.n = n;
  t.E_H = simd::hessian_energy(hb);

  if (grad_W) {
    *grad_W = Field2D::zeros(g);
    // u1 couples through (m11, m12), u2 through (m21, m22).
    ops.d1x.apply_transpose_add(g, 0, g11.data(), grad_W->u1.data());
    ops.d1y.apply_transpose_add(g, 1, g12.data(), grad_W->u1.data());
    ops.d1x.apply_transpose_add(g, 0, g21.data(), grad_W->u2.data());
    ops.d1y.apply_transpose_add(g, 1, g22.data(), grad_W->u2.data());
  }
  if (grad_H) {
    *grad_H = Field2D::zeros(g);
    std::vector<double> tmp(n);
    for (int c = 0; c < 2; ++c) {
      double* out = grad_H->comp(c).data();
      ops.d2x.apply_transpose_add(g, 0, o11[c].data(), out);
      ops.d2y.apply_transpose_add(g, 1, o22[c].data(), out);
      std::fill(tmp.begin(), tmp.end(), 0.0);
      ops.d1y.apply_transpose_add(g, 1, o12[c].data(), tmp.data());
      ops.d1x.apply_transpose_add(g, 0, tmp.data(), out);
    }
  }
  return t;
}

EnergyTerms energy_terms(const Field2D& u, const Potential& w, const Region* region) {
  const GridOperators ops(u.grid);
  return energy_terms(u, w, ops, quadrature_weights(u.grid, region));
}

EnergyReport energy_E_eps(const Field2D& u, const Potential& w, double eps, const Region* region,
                          const std::vector<Region>& breakdown) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const GridOperators ops(u.grid);
  EnergyReport rep;
  rep.eps = eps;
  const EnergyTerms t = energy_terms(u, w, ops, quadrature_weights(u.grid, region));
  rep.potential_term = t.E_W / eps;
  rep.hessian_term = eps * t.E_H;
  rep.total = rep.potential_term + rep.hessian_term;
  for (const Region& r : breakdown) {
    const EnergyTerms tr = energy_terms(u, w, ops, quadrature_weights(u.grid, &r));
    RegionEnergy re;
    re.name = r.name;
    re.potential_term = tr.E_W / eps;
    re.hessian_term = eps * tr.E_H;
    re.total = re.potential_term + re.hessian_term;
    rep.regions.push_back(re);
  }
  return rep;
}

}  // namespace dgmm
