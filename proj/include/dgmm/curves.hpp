#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dgmm/mat2.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

// Piecewise-linear curve in matrix space.
struct Curve {
  std::vector<double> s;
  std::vector<Mat2> m;

  std::size_t size() const { return s.size(); }
  // Throws InvalidInput unless there are at least two samples with increasing params.
  void validate() const;
  // Linear interpolation, clamped to the end values outside [s.front(), s.back()].
  Mat2 at(double t) const;
  // Parameter map t -> -t, traversed in the same geometric order.
  Curve reversed() const;

  static Curve segment(const Mat2& from, const Mat2& to, std::size_t points, double s_lo = -1.0,
                       double s_hi = 1.0);
};

// L_W = 2 sum sqrt(W(midpoint)) |segment|.
double curve_length_LW(const Curve& phi, const Potential& w);

// Midpoint-rule I_eps = sum (1/eps) W(mid) ds + eps |dM|^2 / ds. Since each term dominates
// 2 sqrt(W(mid)) |dM|, the discrete inequality L_W <= I_eps holds exactly. Throws
// NonWellTails unless both endpoints lie within tail_tol of a well.
double curve_energy_I_eps(const Curve& phi, const Potential& w, double eps,
                          double tail_tol = 1e-4);

struct GeodesicOptions {
  int points = 201;
  int max_iterations = 20000;
  int redistribute_every = 50;
  double rel_tol = 1e-11;
  // Also solve at 2P - 1 points and extrapolate.
  bool refine = true;
  // Entry mask (m11, m12, m21, m22); masked-out entries stay on the straight line.
  std::array<bool, 4> free_entries{true, true, true, true};
  // Amplitude of a smooth seeded perturbation of the straight initial curve.
  double init_perturbation = 0.0;
  std::uint64_t seed = 0;
};

struct GeodesicResult {
  double d = 0.0;               // minimized discrete length at P points
  double d_refined = 0.0;       // same at 2P - 1 points (equals d without refinement)
  double d_extrapolated = 0.0;  // Richardson value assuming second-order convergence
  double uncertainty = 0.0;     // |d - d_refined|
  Curve geodesic;
  int iterations = 0;
};

// Relaxes a curve with pinned endpoints; the length is an upper bound on d_W(M, N).
// Throws NoConvergence when the iteration budget is exhausted.
GeodesicResult geodesic_distance(const Potential& w, const Mat2& from, const Mat2& to,
                                 const GeodesicOptions& opts = {});

// 2 sup sqrt(W) over B_R(0): sampled, then polished by local ascent.
double lipschitz_constant_estimate(const Potential& w, double radius,
                                   std::size_t n_samples = 20000);

// d_W(M, N) and the Lipschitz constant on B_R(0), R = 2 max(|M|, |N|).
struct DistanceContext {
  double d = 0.0;
  double uncertainty = 0.0;
  double lip_d = 0.0;
  double radius = 0.0;
};

DistanceContext make_distance_context(const Potential& w, const Mat2& from, const Mat2& to,
                                      const GeodesicOptions& opts = {});

// min(|M - N|/2, (3d - L_W(phi)) / (8 L_d)); HypothesisViolated if L_W(phi) >= 3d.
double admissibility_gamma(const Mat2& from, const Mat2& to, const Potential& w, const Curve& phi,
                           const DistanceContext& ctx);

// min((3d - K) / (12 L_d), |A - B| / 8); HypothesisViolated if K >= 3d.
double alpha_K(const WellPair& wells, double K, const DistanceContext& ctx);

// Midpoint of the last exit from B_alpha(from) and the first entry into B_alpha(to),
// computed from exact segment/ball intersections. NotAdmissible if either preimage is
// empty or the exit does not precede the entry.
struct SeparationPoint {
  double s = 0.0;
  double exit_from = 0.0;
  double entry_to = 0.0;
};

SeparationPoint phase_separation(const Curve& phi, double alpha, const Mat2& from, const Mat2& to);

inline double phase_separating_point(const Curve& phi, double alpha, const Mat2& from,
                                     const Mat2& to) {
  return phase_separation(phi, alpha, from, to).s;
}

struct AdmissiblePair {
  Curve curve;
  double alpha = 0.0;
  Mat2 from, to;
  double s_sep = 0.0;
  double gamma = 0.0;
};

// Checks alpha < gamma (NotAdmissible otherwise) and computes the separating point.
AdmissiblePair make_admissible_pair(const Curve& phi, double alpha, const Mat2& from,
                                    const Mat2& to, const Potential& w, const DistanceContext& ctx);

struct DifferenceBoundReport {
  double C_empirical = 0.0;
  std::size_t samples_used = 0;
  double s_phi = 0.0;
  double s_psi = 0.0;
};

// Empirical C_alpha = max |phi - psi|^2 / (W(phi) + W(psi)) over the union of sample
// parameters. MidpointMismatch if the separating points differ by more than s_tol.
DifferenceBoundReport difference_bound_check(const Curve& phi, const Curve& psi, double alpha,
                                             const Mat2& from, const Mat2& to, const Potential& w,
                                             double s_tol = 1e-9);

// Trace of a planar field along a vertical line: u, d1u and d2u sampled in x2.
struct TraceProfile {
  std::vector<double> s;
  std::vector<Vec2> u;
  std::vector<Vec2> d1u;
  std::vector<Vec2> d2u;

  std::size_t size() const { return s.size(); }
  // zeta = (d1u, d2u) as a matrix-valued curve.
  Curve zeta() const;
  // max |d2u - (du/ds)| using the midpoint derivative of u against averaged d2u.
  double derivative_mismatch() const;
};

struct MidpointReport {
  double s_phi = 0.0;
  double s_psi = 0.0;
  double distance = 0.0;
  double ratio = 0.0;  // distance / sqrt(h eps (1 + I_phi + I_psi))
  double I_phi = 0.0;
  double I_psi = 0.0;
  double alpha = 0.0;
};

// HypothesisViolated if either I_eps >= K, K >= 3d, or the u-traces differ on |s| >= h.
MidpointReport midpoint_bound_check(const TraceProfile& zeta_phi, const TraceProfile& zeta_psi,
                                    double h, double eps, double K, const Potential& w,
                                    const DistanceContext& ctx);

}  // namespace dgmm
