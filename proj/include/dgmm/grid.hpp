#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "dgmm/mat2.hpp"

namespace dgmm {

// Uniform node grid. With periodic_x1 the nodes are x1_lo + i h1, i < n1, and the period
// is n1 h1; otherwise both x1 ends are nodes. x2 always includes both ends.
struct GridSpec {
  int n1 = 0;
  int n2 = 0;
  double x1_lo = 0.0;
  double x2_lo = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  bool periodic_x1 = false;

  static GridSpec make(int n1, int n2, double x1_lo, double x1_hi, double x2_lo, double x2_hi,
                       bool periodic_x1);

  std::size_t size() const { return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i);
  }
  double x1(int i) const { return x1_lo + h1 * i; }
  double x2(int j) const { return x2_lo + h2 * j; }
  double x1_hi() const { return periodic_x1 ? x1_lo + h1 * n1 : x1_lo + h1 * (n1 - 1); }
  double x2_hi() const { return x2_lo + h2 * (n2 - 1); }
};

struct Field2D {
  GridSpec grid;
  std::vector<double> u1, u2;

  static Field2D zeros(const GridSpec& g);

  Vec2 at(int i, int j) const {
    const std::size_t k = grid.index(i, j);
    return {u1[k], u2[k]};
  }
  void set(int i, int j, const Vec2& v) {
    const std::size_t k = grid.index(i, j);
    u1[k] = v.x;
    u2[k] = v.y;
  }
  std::vector<double>& comp(int c) { return c == 0 ? u1 : u2; }
  const std::vector<double>& comp(int c) const { return c == 0 ? u1 : u2; }
};

// Sparse 1D difference operator: one row of (offset, coefficient) pairs per node.
// Interior rows are second-order central differences; non-periodic ends use
// second-order one-sided rows.
class Stencil1D {
 public:
  enum class Kind { First, Second };

  Stencil1D(Kind kind, int n, double h, bool periodic);

  // out[j-line] = D in[j-line] along x1 (axis 0) or x2 (axis 1) of the grid.
  void apply(const GridSpec& g, int axis, const double* in, double* out) const;
  // Transposed operator; accumulates into out.
  void apply_transpose_add(const GridSpec& g, int axis, const double* in, double* out) const;

  int size() const { return n_; }

 private:
  struct Entry {
    int col;
    double coef;
  };
  int n_;
  std::vector<std::vector<Entry>> rows_;
};

struct GridOperators {
  Stencil1D d1x, d2x, d1y, d2y;
  explicit GridOperators(const GridSpec& g);
};

// Per-node derivatives; index c is the component of u.
struct FieldDerivatives {
  std::array<std::vector<double>, 2> d1, d2, h11, h12, h22;

  Mat2 gradient(std::size_t k) const { return {d1[0][k], d2[0][k], d1[1][k], d2[1][k]}; }
};

FieldDerivatives differentiate(const Field2D& u, const GridOperators& ops, bool hessian = true);

}  // namespace dgmm
