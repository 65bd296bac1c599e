#pragma once

namespace dgmm {

// Quintic smoothstep ramp from `from` to `to` over [center - width/2, center + width/2],
// flat outside. C^2, with |rho'| <= 1.875 |to - from| / width and
// |rho''| <= (10 / sqrt 3) |to - from| / width^2.
class CutoffProfile {
 public:
  CutoffProfile(double center, double width, double from = 0.0, double to = 1.0);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  double center() const { return center_; }
  double width() const { return width_; }
  double lo() const { return center_ - 0.5 * width_; }
  double hi() const { return center_ + 0.5 * width_; }
  double amplitude() const { return to_ - from_; }
  // Derivative order up to which the profile is continuous.
  static constexpr int order() { return 2; }

  static constexpr double kD1Constant = 1.875;
  static constexpr double kD2Constant = 5.773502691896258;  // 10 / sqrt(3)
  double d1_bound() const;
  double d2_bound() const;

 private:
  double center_, width_, from_, to_;
};

}  // namespace dgmm
