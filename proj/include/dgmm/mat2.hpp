#pragma once

#include <array>
#include <cmath>

namespace dgmm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

// 2x2 real matrix, row-major entries. Columns: m1 = (m11, m21), m2 = (m12, m22).
// For a deformation gradient, column j holds the partial derivative along x_j.
struct Mat2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

  static constexpr Mat2 from_columns(const Vec2& c1, const Vec2& c2) {
    return {c1.x, c2.x, c1.y, c2.y};
  }

  constexpr Vec2 col1() const { return {m11, m21}; }
  constexpr Vec2 col2() const { return {m12, m22}; }

  constexpr Mat2 operator+(const Mat2& o) const {
    return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22};
  }
  constexpr Mat2 operator-(const Mat2& o) const {
    return {m11 - o.m11, m12 - o.m12, m21 - o.m21, m22 - o.m22};
  }
  constexpr Mat2 operator-() const { return {-m11, -m12, -m21, -m22}; }
  constexpr Mat2 operator*(double s) const { return {m11 * s, m12 * s, m21 * s, m22 * s}; }

  constexpr double dot(const Mat2& o) const {
    return m11 * o.m11 + m12 * o.m12 + m21 * o.m21 + m22 * o.m22;
  }
  // Squared Frobenius norm.
  constexpr double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  constexpr std::array<double, 4> as_array() const { return {m11, m12, m21, m22}; }
  static constexpr Mat2 from_array(const std::array<double, 4>& e) {
    return {e[0], e[1], e[2], e[3]};
  }
  constexpr double operator[](int k) const {
    return k == 0 ? m11 : k == 1 ? m12 : k == 2 ? m21 : m22;
  }
  constexpr double& at(int k) {
    return k == 0 ? m11 : k == 1 ? m12 : k == 2 ? m21 : m22;
  }

  constexpr bool operator==(const Mat2&) const = default;
};

constexpr Mat2 operator*(double s, const Mat2& m) { return m * s; }

}  // namespace dgmm
