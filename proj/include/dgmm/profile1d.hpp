#pragma once

#include <vector>

#include "dgmm/curves.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

// Minimizer of int W~(g) + |g'|^2 over (-half_len, half_len) with g(+-half_len) = +-a.
struct Profile1D {
  double half_len = 0.0;
  std::vector<double> s;
  std::vector<Vec2> g;
  double energy = 0.0;
  double potential_part = 0.0;
  double derivative_part = 0.0;
  int iterations = 0;

  double spacing() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
};

// Discrete energy on a uniform grid: trapezoid rule for W~ and squared forward
// differences for the derivative term. Optionally writes the gradient with respect to
// every node (end entries included).
double profile_energy(const Potential& w, double h, const std::vector<Vec2>& g,
                      std::vector<Vec2>* grad = nullptr, double* potential_part = nullptr,
                      double* derivative_part = nullptr);

// L-BFGS from the linear ramp -a -> a. Throws NoConvergence on budget exhaustion.
Profile1D solve_profile_1d(const Potential& w, double half_len, int n_points);

struct EquipartitionReport {
  double potential_part = 0.0;
  double derivative_part = 0.0;
  double ratio = 0.0;  // |potential - derivative| / total
};

EquipartitionReport equipartition_report(const Profile1D& p, const Potential& w);

struct ContinuationStep {
  double half_len;
  int n_points;
  double energy;
};

struct ContinuationOptions {
  std::vector<double> half_lens{4.0, 6.0, 8.0};
  double points_per_unit = 100.0;  // n = points_per_unit * half_len
  double rel_change = 1e-3;
  // Further half_len values tried (in steps of 2) if the listed ones did not settle.
  double max_half_len = 16.0;
};

struct ContinuationResult {
  Profile1D profile;  // last solved profile
  std::vector<ContinuationStep> trace;
  bool settled = false;
};

ContinuationResult solve_profile_continuation(const Potential& w,
                                              const ContinuationOptions& opts = {});

struct KStarReport {
  double K_star = 0.0;
  double d_tilde = 0.0;
  double d_tilde_uncertainty = 0.0;
  double rel_gap = 0.0;  // |K_* - d~| / d~
  std::vector<ContinuationStep> trace;
  bool settled = false;
};

// K_* by continuation and d_W~(B, A) by relaxation restricted to the m2 entries.
KStarReport check_K_star_equals_geodesic(const Potential& w, const ContinuationOptions& copts = {},
                                         GeodesicOptions gopts = {});

// Antiderivative U(t) = int_0^t g by the trapezoid rule on the profile grid; U is
// extended affinely (slope +-a) beyond the ends.
struct ProfileAntiderivative {
  std::vector<double> s;
  std::vector<Vec2> U;
  std::vector<Vec2> g;
  Vec2 a;

  Vec2 value(double t) const;
  Vec2 slope(double t) const;
};

ProfileAntiderivative profile_antiderivative(const Profile1D& p, const WellPair& wells);

}  // namespace dgmm
