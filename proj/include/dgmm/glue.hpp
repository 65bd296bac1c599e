#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dgmm/curves.hpp"
#include "dgmm/cutoff.hpp"
#include "dgmm/energy.hpp"
#include "dgmm/grid.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

// ---------------------------------------------------------------------------
// Balanced index selection.

// First 0-based index k with a_k <= tau C_a / n, b_k <= 2 tau C_b / ((tau - 1) n) and
// c_k <= 2 tau C_c / ((tau - 1) n). InvalidBounds if a sequence is negative, exceeds its
// bound in sum, or tau <= 1.
std::size_t select_balanced_index(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> c, double C_a, double C_b, double C_c,
                                  double tau);

// ---------------------------------------------------------------------------
// Traces.

// Column `i` of u: values, d1u and d2u from the grid stencils.
TraceProfile extract_trace(const Field2D& u, int column);

// Trace of the x1-constant extension u(s, x2): same values, d1u = 0.
TraceProfile flat_trace(const TraceProfile& t);

// Integral of the second gradient column, int_{lower}^{x2} phi_2, as the piecewise cubic
// Hermite interpolant of the node values u - u(lower) with nodal slopes d2u, continued
// affinely beyond the sampled range.
class TraceAntiderivative {
 public:
  explicit TraceAntiderivative(const TraceProfile& t, double lower_limit = -0.5);

  Vec2 value(double x2) const;
  Vec2 slope(double x2) const;
  // Linear interpolation of d1u, constant beyond the ends.
  Vec2 first_column(double x2) const;

  const TraceProfile& trace() const { return t_; }

 private:
  TraceProfile t_;
  Vec2 offset_;
  std::size_t segment(double x) const;
  Vec2 raw(double x) const;
};

// Samples of the shifted curve s -> phi(s + beta) on the same nodes.
TraceProfile shift_trace(const TraceProfile& t, double beta);

// ---------------------------------------------------------------------------
// Slice selection and horizontal modification.

enum class Side { Left, Right };

struct SliceSelection {
  double s_value = 0.0;
  int column = 0;
  TraceProfile trace;
  double trace_energy = 0.0;  // column integral of (1/eps) W + eps |grad^2 u|^2
  int interval_index = 0;     // k0 in 1..m
  int intervals = 0;          // m actually used
  double band_energy = 0.0;
  double budget = 0.0;        // tau~ K_ref delta
};

// Band (1/2 - 2 delta, 1/2 - delta) on the right, mirrored on the left. BudgetExceeded if
// the band energy is not below tau~ K_ref delta with tau~ = (1 + tau) / 2; NoSlice if the
// best column of the chosen subinterval does not satisfy trace_energy < tau K_ref.
SliceSelection select_trace_slice(const Field2D& u, const Potential& w, double eps, double delta,
                                  double tau, Side side, double K_ref);

struct HorizontalReport {
  double delta = 0.0;  // snapped to the grid
  SliceSelection left, right;
  double band_energy = 0.0;   // E(w) on |x1| in (1/2 - 2 delta, 1/2)
  double outer_energy = 0.0;  // E(w) on |x1| in (1/2, 1/2 + delta)
  double total_energy = 0.0;  // E(w) on (-1/2 - delta, 1/2 + delta)
  double input_energy = 0.0;  // E(u) on Q
};

// u must live on a non-periodic grid with both x1 = -1/2 and x1 = 1/2 as nodes. Returns
// w on (-1/2 - delta, 1/2 + delta) with delta rounded to a multiple of the x1 spacing.
Field2D modify_horizontal(const Field2D& u, const Potential& w, double eps, double delta,
                          double tau, double K_ref, HorizontalReport* report = nullptr);

// ---------------------------------------------------------------------------
// Interpolants. All live on (-halfwidth, halfwidth) x (trace nodes) with x1 spacing h1
// (the trace node spacing when h1 <= 0); halfwidth must be a multiple of h1.

struct InterpolantReport {
  double left_trace_error = 0.0;   // max |column - target antiderivative| at x1 = -halfwidth
  double right_trace_error = 0.0;  // same at x1 = +halfwidth
  double flatness = 0.0;           // max |d1| on columns whose stencil stays in a flat zone
  int flat_columns = 0;
  double beta = 0.0;
  double junction_jump = 0.0;           // combined only: field mismatch of the two halves
  double junction_gradient_jump = 0.0;  // combined only
  double offset = 0.0;                  // combined only: constant added to the right half
  double s_phi = 0.0, s_psi = 0.0;
  bool doubled_tail = false;  // same-midpoint step used the 2h tail
};

Field2D build_translation_interpolant(const TraceProfile& phi, double beta, double halfwidth,
                                      double eps, double h1 = 0.0,
                                      InterpolantReport* report = nullptr);

// Orientation: phi at x1 = -halfwidth, psi at x1 = +halfwidth.
Field2D build_same_midpoint_interpolant(const TraceProfile& phi, const TraceProfile& psi,
                                        double halfwidth, double eps, double h, double K,
                                        const Potential& w, const DistanceContext& ctx,
                                        double h1 = 0.0, InterpolantReport* report = nullptr);

// Left half: translation from phi by beta = s_phi - s_psi, which moves the separating
// point of the shifted trace onto s_psi. Right half: same-midpoint blend towards psi with
// tail 2h. MidpointTooFar if |s_phi - s_psi| >= h_tilde sqrt(eps).
Field2D build_combined_interpolant(const TraceProfile& phi, const TraceProfile& psi,
                                   double halfwidth, double eps, double h, double h_tilde,
                                   double K, const Potential& w, const DistanceContext& ctx,
                                   double h1 = 0.0, InterpolantReport* report = nullptr);

// ---------------------------------------------------------------------------
// Periodic recovery.

struct RecoveryReport {
  HorizontalReport horizontal;
  MidpointReport midpoint;
  InterpolantReport interpolant;
  double delta = 0.0;
  double h = 0.0;
  double h_tilde = 0.0;
  double M1_x = 0.0, M1_y = 0.0, M2_x = 0.0, M2_y = 0.0;
  double wrap_mismatch = 0.0;  // max |grad z(-1/2) - grad z(1/2)|
  double junction_jump = 0.0;  // field mismatch at x1 = -+delta/2
  double energy = 0.0;         // E(z) on (-1, 1)
  double interpolant_energy = 0.0;
  double overhead = 0.0;  // energy / (2 K_ref) - 1
  std::string stage;      // last stage reached; names the failing step on error
};

struct RecoveryOptions {
  // Gate constant; the default 0.99 h / sqrt(eps) is the largest value with h_tilde
  // sqrt(eps) < h.
  double h_tilde = 0.0;
};

Field2D construct_periodic_recovery(const Field2D& u, const Potential& w, double eps,
                                    double delta, double tau, double h, double K_ref,
                                    const DistanceContext& ctx, RecoveryReport* report = nullptr,
                                    const RecoveryOptions& opts = {});

// ---------------------------------------------------------------------------
// Synthetic traces used by the sweeps and the tests.

// Odd transition d2u = a sin(pi (x2 - c) / (2 width)) on |x2 - c| < width, +-a beyond,
// with u = int d2u from x2 = -1/2 and d1u = kappa (1 - ((x2 - c)/width)^2)^2 e1-bump
// (even about c, so the separating point is exactly c).
TraceProfile sine_transition_trace(const std::vector<double>& s, const WellPair& wells,
                                   double center, double width, double kappa = 0.0);

// Trace whose transition sits at `shift` and whose flux deficit is repaid by a bump
// on the A side, supported in (bump_center - bump_half, bump_center + bump_half); the
// u-trace then agrees with the unshifted one for |x2| >= bump_center + bump_half.
TraceProfile shifted_compensated_trace(const std::vector<double>& s, const WellPair& wells,
                                       double width, double shift, double bump_center,
                                       double bump_half);

std::vector<double> uniform_nodes(double lo, double hi, int n);

}  // namespace dgmm
