#include "dgmm/grid.hpp"

#include "dgmm/error.hpp"

namespace dgmm {

GridSpec GridSpec::make(int n1, int n2, double x1_lo, double x1_hi, double x2_lo, double x2_hi,
                        bool periodic_x1) {
  if (n1 < 4 || n2 < 4) throw Error(ErrorKind::InvalidInput, "grid needs at least 4 nodes per axis");
  if (!(x1_hi > x1_lo) || !(x2_hi > x2_lo))
    throw Error(ErrorKind::InvalidInput, "grid extents must be increasing");
  GridSpec g;
  g.n1 = n1;
  g.n2 = n2;
  g.x1_lo = x1_lo;
  g.x2_lo = x2_lo;
  g.periodic_x1 = periodic_x1;
  g.h1 = periodic_x1 ? (x1_hi - x1_lo) / n1 : (x1_hi - x1_lo) / (n1 - 1);
  g.h2 = (x2_hi - x2_lo) / (n2 - 1);
  return g;
}

Field2D Field2D::zeros(const GridSpec& g) {
  Field2D f;
  f.grid = g;
  f.u1.assign(g.size(), 0.0);
  f.u2.assign(g.size(), 0.0);
  return f;
}

Stencil1D::Stencil1D(Kind kind, int n, double h, bool periodic) : n_(n), rows_(static_cast<std::size_t>(n)) {
  if (n < 4) throw Error(ErrorKind::InvalidInput, "stencil needs at least 4 nodes");
  const double ih = 1.0 / h;
  const double ih2 = ih * ih;
  auto wrap = [n](int k) { return ((k % n) + n) % n; };
  for (int i = 0; i < n; ++i) {
    auto& r = rows_[static_cast<std::size_t>(i)];
    const bool interior = periodic || (i > 0 && i < n - 1);
    if (interior) {
      if (kind == Kind::First) {
        r = {{wrap(i - 1), -0.5 * ih}, {wrap(i + 1), 0.5 * ih}};
      } else {
        r = {{wrap(i - 1), ih2}, {i, -2.0 * ih2}, {wrap(i + 1), ih2}};
      }
      continue;
    }
    const int dir = i == 0 ? 1 : -1;
    if (kind == Kind::First) {
      const double s = dir * ih;
      r = {{i, -1.5 * s}, {i + dir, 2.0 * s}, {i + 2 * dir, -0.5 * s}};
    } else {
      r = {{i, 2.0 * ih2}, {i + dir, -5.0 * ih2}, {i + 2 * dir, 4.0 * ih2}, {i + 3 * dir, -ih2}};
    }
  }
}

void Stencil1D::apply(const GridSpec& g, int axis, const double* in, double* out) const {
  if (axis == 0) {
    for (int j = 0; j < g.n2; ++j) {
      const double* line = in + g.index(0, j);
      double* o = out + g.index(0, j);
      for (int i = 0; i < g.n1; ++i) {
        double s = 0.0;
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) s += e.coef * line[e.col];
        o[i] = s;
      }
    }
  } else {
    const std::size_t stride = static_cast<std::size_t>(g.n1);
    for (int j = 0; j < g.n2; ++j) {
      double* o = out + g.index(0, j);
      const auto& row = rows_[static_cast<std::size_t>(j)];
      for (int i = 0; i < g.n1; ++i) o[i] = 0.0;
      for (const Entry& e : row) {
        const double* src = in + stride * static_cast<std::size_t>(e.col);
        for (int i = 0; i < g.n1; ++i) o[i] += e.coef * src[i];
      }
    }
  }
}

void Stencil1D::apply_transpose_add(const GridSpec& g, int axis, const double* in,
                                    double* out) const {
  if (axis == 0) {
    for (int j = 0; j < g.n2; ++j) {
      const double* line = in + g.index(0, j);
      double* o = out + g.index(0, j);
      for (int i = 0; i < g.n1; ++i)
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) o[e.col] += e.coef * line[i];
    }
  } else {
    const std::size_t stride = static_cast<std::size_t>(g.n1);
    for (int j = 0; j < g.n2; ++j) {
      const double* src = in + g.index(0, j);
      for (const Entry& e : rows_[static_cast<std::size_t>(j)]) {
        double* o = out + stride * static_cast<std::size_t>(e.col);
        for (int i = 0; i < g.n1; ++i) o[i] += e.coef * src[i];
      }
    }
  }
}

GridOperators::GridOperators(const GridSpec& g)
    : d1x(Stencil1D::Kind::First, g.n1, g.h1, g.periodic_x1),
      d2x(Stencil1D::Kind::Second, g.n1, g.h1, g.periodic_x1),
      d1y(Stencil1D::Kind::First, g.n2, g.h2, false),
      d2y(Stencil1D::Kind::Second, g.n2, g.h2, false) {}

FieldDerivatives differentiate(const Field2D& u, const GridOperators& ops, bool hessian) {
  const GridSpec& g = u.grid;
  const std::size_t n = g.size();
  FieldDerivatives d;
  for (int c = 0; c < 2; ++c) {
    const double* in = u.comp(c).data();
    d.d1[c].resize(n);
    d.d2[c].resize(n);
    ops.d1x.apply(g, 0, in, d.d1[c].data());
    ops.d1y.apply(g, 1, in, d.d2[c].data());
    if (!hessian) continue;
    d.h11[c].resize(n);
    d.h12[c].resize(n);
    d.h22[c].resize(n);
    ops.d2x.apply(g, 0, in, d.h11[c].data());
    ops.d2y.apply(g, 1, in, d.h22[c].data());
    ops.d1y.apply(g, 1, d.d1[c].data(), d.h12[c].data());
  }
  return d;
}

}  // namespace dgmm
