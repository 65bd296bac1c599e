#include <cmath>

#include "dgmm/error.hpp"
#include "dgmm/glue.hpp"

namespace dgmm {

namespace {

// Runs one pipeline stage; errors keep their kind and gain the stage name.
template <class F>
auto stage(RecoveryReport& rep, const char* name, F&& f) {
  rep.stage = name;
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

Field2D construct_periodic_recovery(const Field2D& u, const Potential& w, double eps,
                                    double delta, double tau, double h, double K_ref,
                                    const DistanceContext& ctx, RecoveryReport* report,
                                    const RecoveryOptions& opts) {
  RecoveryReport local;
  RecoveryReport& rep = report ? *report : local;
  rep = {};
  const GridSpec& g = u.grid;

  // Geometry: N columns per unit length, delta a multiple of 2 h1.
  const long N = std::lround(1.0 / g.h1);
  const long n_half = std::max(1L, std::lround(delta / (2.0 * g.h1)));
  stage(rep, "input", [&] {
    if (g.periodic_x1 || std::abs(g.x1_lo + 0.5) > 1e-9 || std::abs(g.x1_hi() - 0.5) > 1e-9 ||
        std::abs(N * g.h1 - 1.0) > 1e-9 || N % 2 != 0)
      throw Error(ErrorKind::InvalidInput,
                  "u needs a non-periodic grid spanning [-1/2, 1/2] with an even column count");
    if (!(eps > 0.0 && h > eps && h < 0.5))
      throw Error(ErrorKind::InvalidInput, "need 0 < eps < h < 1/2");
    if (2 * n_half >= N / 2) throw Error(ErrorKind::InvalidInput, "delta too large for the grid");
    return 0;
  });
  const double d = 2.0 * static_cast<double>(n_half) * g.h1;
  const long ne = 2 * n_half;
  rep.delta = d;
  rep.h = h;
  rep.h_tilde = opts.h_tilde > 0.0 ? opts.h_tilde : 0.99 * h / std::sqrt(eps);
  const double K = tau * K_ref;

  const Field2D wf = stage(rep, "horizontal modification", [&] {
    return modify_horizontal(u, w, eps, d, tau, K_ref, &rep.horizontal);
  });

  // Traces of the x1-constant extensions at s+ (left end of the middle band) and s-.
  const TraceProfile phi = flat_trace(rep.horizontal.right.trace);
  const TraceProfile psi = flat_trace(rep.horizontal.left.trace);

  rep.midpoint = stage(rep, "midpoint estimate", [&] {
    MidpointReport m = midpoint_bound_check(phi, psi, h, eps, K, w, ctx);
    if (!(m.distance < rep.h_tilde * std::sqrt(eps)))
      throw Error(ErrorKind::MidpointTooFar, "separating points too far apart");
    return m;
  });

  const Field2D zt = stage(rep, "combined interpolant", [&] {
    return build_combined_interpolant(phi, psi, 0.5 * d, eps, h, rep.h_tilde, K, w, ctx, g.h1,
                                      &rep.interpolant);
  });

  return stage(rep, "assembly", [&] {
    GridSpec gz = wf.grid;
    gz.n1 = static_cast<int>(2 * N + 1);
    gz.x1_lo = -1.0;
    Field2D z = Field2D::zeros(gz);
    const long c_lo = N - n_half, c_hi = N + n_half;  // middle band columns of z
    const int last = zt.grid.n1 - 1;
    const int w_left = static_cast<int>(c_lo + ne);       // w column at x1 = 1/2 - d/2
    const int w_right = static_cast<int>(c_hi - N + ne);  // w column at x1 = -1/2 + d/2
    const Vec2 M1 = zt.at(0, 0) - wf.at(w_left, 0);
    const Vec2 M2 = zt.at(last, 0) - wf.at(w_right, 0);
    rep.M1_x = M1.x, rep.M1_y = M1.y, rep.M2_x = M2.x, rep.M2_y = M2.y;

    double jump = 0.0;
    for (int j = 0; j < gz.n2; ++j) {
      jump = std::max(jump, (zt.at(0, j) - (wf.at(w_left, j) + M1)).norm());
      jump = std::max(jump, (zt.at(last, j) - (wf.at(w_right, j) + M2)).norm());
    }
    rep.junction_jump = jump;

    for (long iz = 0; iz < gz.n1; ++iz) {
      for (int j = 0; j < gz.n2; ++j) {
        Vec2 v;
        if (iz < c_lo)
          v = wf.at(static_cast<int>(iz + ne), j) + M1;
        else if (iz > c_hi)
          v = wf.at(static_cast<int>(iz - N + ne), j) + M2;
        else
          v = zt.at(static_cast<int>(iz - c_lo), j);
        z.set(static_cast<int>(iz), j, v);
      }
    }

    // Periodicity of the restriction to (-1/2, 1/2).
    const GridOperators ops(gz);
    const FieldDerivatives dz = differentiate(z, ops, false);
    const int i_a = static_cast<int>(N / 2), i_b = static_cast<int>(3 * N / 2);
    double wrap = 0.0;
    for (int j = 0; j < gz.n2; ++j)
      wrap = std::max(wrap, (dz.gradient(gz.index(i_a, j)) - dz.gradient(gz.index(i_b, j))).norm());
    rep.wrap_mismatch = wrap;
    if (wrap > 1e-8)
      throw Error(ErrorKind::HypothesisViolated, "gradient of z is not wrap-periodic");

    const double y_lo = gz.x2_lo, y_hi = gz.x2_hi();
    const std::vector<Region> parts{{"interpolant", -0.5 * d, 0.5 * d, y_lo, y_hi}};
    const EnergyReport er = energy_E_eps(z, w, eps, nullptr, parts);
    rep.energy = er.total;
    rep.interpolant_energy = er.regions[0].total;
    rep.overhead = er.total / (2.0 * K_ref) - 1.0;
    rep.stage = "done";
    return z;
  });
}

}  // namespace dgmm
