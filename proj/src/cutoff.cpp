#include "dgmm/cutoff.hpp"

#include <cmath>

#include "dgmm/error.hpp"

namespace dgmm {

CutoffProfile::CutoffProfile(double center, double width, double from, double to)
    : center_(center), width_(width), from_(from), to_(to) {
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidInput, "cutoff width must be positive");
}

double CutoffProfile::value(double x) const {
  const double t = (x - lo()) / width_;
  if (t <= 0.0) return from_;
  if (t >= 1.0) return to_;
  return from_ + (to_ - from_) * t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double CutoffProfile::d1(double x) const {
  const double t = (x - lo()) / width_;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  return (to_ - from_) * 30.0 * s * s / width_;
}

double CutoffProfile::d2(double x) const {
  const double t = (x - lo()) / width_;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return (to_ - from_) * 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (width_ * width_);
}

double CutoffProfile::d1_bound() const { return kD1Constant * std::abs(to_ - from_) / width_; }

double CutoffProfile::d2_bound() const {
  return kD2Constant * std::abs(to_ - from_) / (width_ * width_);
}

}  // namespace dgmm
