#pragma once

#include <string>
#include <vector>

#include "dgmm/grid.hpp"
#include "dgmm/potentials.hpp"

namespace dgmm {

struct Region {
  std::string name;
  double x1_lo, x1_hi, x2_lo, x2_hi;
};

// Trapezoid weights over the nodes inside the region (all nodes without one). In a
// periodic x1 direction covering the full period the weights are uniform.
std::vector<double> quadrature_weights(const GridSpec& g, const Region* region = nullptr);

struct EnergyTerms {
  double E_W = 0.0;  // int W(grad u)
  double E_H = 0.0;  // int |grad^2 u|^2
};

// Optional outputs receive dE_W/du and dE_H/du with respect to the node values.
// Uses the vectorised kernels when the potential is a multiple of W0.
EnergyTerms energy_terms(const Field2D& u, const Potential& w, const GridOperators& ops,
                         const std::vector<double>& weights, Field2D* grad_W = nullptr,
                         Field2D* grad_H = nullptr);

EnergyTerms energy_terms(const Field2D& u, const Potential& w, const Region* region = nullptr);

struct RegionEnergy {
  std::string name;
  double potential_term = 0.0;
  double hessian_term = 0.0;
  double total = 0.0;
};

struct EnergyReport {
  double eps = 0.0;
  double potential_term = 0.0;  // (1/eps) E_W
  double hessian_term = 0.0;    // eps E_H
  double total = 0.0;
  std::vector<RegionEnergy> regions;
};

// E_eps over `region` (the whole grid when null) plus a breakdown per named rectangle.
EnergyReport energy_E_eps(const Field2D& u, const Potential& w, double eps,
                          const Region* region = nullptr,
                          const std::vector<Region>& breakdown = {});

}  // namespace dgmm
