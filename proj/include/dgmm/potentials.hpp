#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgmm/mat2.hpp"

namespace dgmm {

// Wells A = a (x) e2 and B = -A. Both have a vanishing first column.
class WellPair {
 public:
  explicit WellPair(Vec2 a);

  const Vec2& a() const { return a_; }
  Mat2 A() const { return Mat2::from_columns({0.0, 0.0}, a_); }
  Mat2 B() const { return -A(); }
  // |A - B| = 2|a|.
  double separation() const { return 2.0 * a_.norm(); }

 private:
  Vec2 a_;
};

enum class PotentialKind { Reference, Scaled, Perturbed, Custom };

const char* kind_name(PotentialKind k);

class Potential {
 public:
  using EvalFn = std::function<double(const Mat2&)>;
  using GradFn = std::function<Mat2(const Mat2&)>;

  Potential(WellPair wells, PotentialKind kind, std::string name, EvalFn eval, GradFn grad,
            std::optional<double> growth_constant = std::nullopt,
            std::optional<double> w0_factor = std::nullopt);

  double operator()(const Mat2& m) const { return eval_(m); }
  Mat2 gradient(const Mat2& m) const { return grad_(m); }

  const WellPair& wells() const { return wells_; }
  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::optional<double> growth_constant() const { return growth_constant_; }
  // Set when the potential is exactly factor * W0; the grid kernels use it for the
  // vectorised path.
  std::optional<double> w0_factor() const { return w0_factor_; }

  // W~(M) = W(0, m2): the potential seen by fields without x1 dependence.
  Potential restricted() const;

 private:
  WellPair wells_;
  PotentialKind kind_;
  std::string name_;
  EvalFn eval_;
  GradFn grad_;
  std::optional<double> growth_constant_;
  std::optional<double> w0_factor_;
};

// W0(M) = |m1|^2 + min |m2 -+ a|^2.
double eval_W0(const Mat2& m, const WellPair& wells);

// Gradient of W0 on the branch achieving the minimum; ties go to the A branch.
// With softness > 0 the min is replaced by -s log(exp(-x/s) + exp(-y/s)).
Mat2 grad_W0(const Mat2& m, const WellPair& wells, double softness = 0.0);

// The smooth-min variant is for robustness studies only; it does not vanish exactly
// at the wells.
Potential make_w0(const WellPair& wells, double softness = 0.0);
Potential make_scaled(const WellPair& wells, double factor);

// W = W0 (1 + sigma p(M))^2 with |p| <= 1 a seeded trigonometric field, so that
// |sqrt W - sqrt W0| <= sigma sqrt W0 holds by construction.
Potential make_perturbed(const WellPair& wells, double sigma, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Growth-constant estimation on sample sets.

struct SampleSpec {
  std::size_t n_ball = 100000;
  double ball_radius_factor = 4.0;  // radius in units of |a|
  std::size_t n_segment = 1000;
  double segment_extent = 1.5;      // segment {(0, t a) : |t| <= extent}
};

// Quasi-random (Halton) points in the matrix-space ball plus points on the segment
// through the wells. Deterministic.
std::vector<Mat2> generate_samples(const WellPair& wells, const SampleSpec& spec = {});

// Halton points in B_R(0) in R^4, with `n_surface` extra points projected onto the sphere.
std::vector<Mat2> ball_samples(double radius, std::size_t n_interior, std::size_t n_surface = 0);

struct GrowthEstimate {
  double C = 1.0;
  std::size_t samples_used = 0;
  // A sample with W0 = 0 but W > 0 was found.
  bool violation = false;
};

// Smallest C with W0/C <= W <= C W0 over the samples. Throws NotDoubleWell if W
// vanishes at a sample off the wells.
GrowthEstimate verify_growth(const Potential& w, std::span<const Mat2> samples);

struct InverseQuadraticEstimate {
  double C = 0.0;                  // smallest C with max|M -+ A|^2 <= C W(M)
  double envelope_constant = 0.0;  // alpha * C, the constant of a C/alpha fit
  double envelope = 0.0;           // max(2, envelope_constant / alpha)
  std::size_t samples_used = 0;
};

InverseQuadraticEstimate inverse_quadratic_constant(const Potential& w, double alpha,
                                                    std::span<const Mat2> samples);

struct SigmaEstimate {
  double sigma = 0.0;
  bool pass = false;  // sigma < 1/2
  std::size_t samples_used = 0;
};

SigmaEstimate estimate_perturbation_sigma(const Potential& w, std::span<const Mat2> samples);

}  // namespace dgmm
