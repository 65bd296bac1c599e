#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dgmm/energy.hpp"
#include "dgmm/grid.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

struct CellSolution {
  Field2D field;
  double scale_L = 0.0;
  double energy = 0.0;
  double E_W = 0.0;
  double E_H = 0.0;
  Vec2 lower_offset;  // c in u = -a x2 + c on the lower strip
  int iterations = 0;
};

struct CellGrid {
  int n1 = 64;
  int n2 = 64;
};

// Periodic-in-x1 grid on Q = (-1/2, 1/2)^2.
GridSpec cell_grid(const CellGrid& spec);

// Rows with |x2| >= 1/4 are pinned.
bool is_pinned_row(const GridSpec& g, int j);

// Checks grad u = +-A on every strip node whose stencil only touches strip nodes.
// Returns the max deviation.
double strip_violation(const Field2D& u, const WellPair& wells);

// L E_W + E_H / L. BoundaryViolation if the strip condition fails beyond tol.
double cell_energy(const Field2D& u, double scale_L, const Potential& w, double tol = 1e-8);
double cell_energy(double E_W, double E_H, double scale_L);

struct OptimalScale {
  double scale_L;
  double energy;
};

OptimalScale optimal_scale(double E_W, double E_H);
OptimalScale optimal_scale(const Field2D& u, const Potential& w);

struct CellInitOptions {
  double profile_half_len = 6.0;
  int profile_points = 600;
  double ripple = 0.0;  // amplitude of a seeded x1-periodic perturbation
  std::uint64_t seed = 0;
};

// Embedded 1D profile compressed into |x2| < 1/4, constant in x1, optional ripple.
Field2D default_cell_init(const Potential& w, const GridSpec& g,
                          const CellInitOptions& opts = {});

struct CellSolveOptions {
  int max_iterations = 50000;
  double rel_tol = 1e-10;
  int window = 10;
  CellInitOptions init;
};

CellSolution solve_cell(const Potential& w, const CellGrid& grid = {},
                        const std::optional<Field2D>& init = std::nullopt,
                        const CellSolveOptions& opts = {});

// Evaluates energy and scale of a given admissible field.
CellSolution evaluate_cell(const Field2D& u, const Potential& w);

// z(y) = eps L u(y / (eps L)) tiled in x1 on the grid aligned with the cell grid
// (spacings scaled by eps L). Covers x1 in [-1/2, 1/2] and the rows of the layer
// |y2| <= eps L / 2 plus `margin_rows` affine rows on both sides; beyond those rows z is
// affine at the wells and carries no energy. LayerTooWide if eps L > 1.
Field2D rescale_to_strip(const CellSolution& cell, double eps, const WellPair& wells,
                         int margin_rows = 4);

// E_eps(z) per unit x1 length, using the trapezoid rule over the stored nodes.
double strip_energy_per_length(const Field2D& z, const Potential& w, double eps);

struct RLEntry {
  double eps;
  double energy;
  double gap;  // |energy - cell energy| / cell energy
};

struct RiemannLebesgueReport {
  double cell_energy = 0.0;
  std::vector<RLEntry> entries;
  bool gaps_decreasing = false;  // only meaningful with two or more entries
};

// Defaults to eps in {1/2, 1/4, 1/8, 1/16} / L.
RiemannLebesgueReport riemann_lebesgue_check(const CellSolution& cell, const Potential& w,
                                             std::vector<double> eps_seq = {});

}  // namespace dgmm
