#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dgmm/cell2d.hpp"
#include "dgmm/glue.hpp"
#include "dgmm/io.hpp"

namespace dgmm {

// ---------------------------------------------------------------------------
// Field and trace families shared by the sweeps and the checks.

// Heteroclinic trace d2u = a sign(x)(1 - exp(-|x|/eps)), d1u = 0.
TraceProfile heteroclinic_trace(const std::vector<double>& s, const WellPair& wells, double eps);

// x1-dependent layer on [-1/2, 1/2]^2: heteroclinic in x2 plus a ripple
// ripple * eps * sin(2 pi k x1) / cosh^2(x2 / eps) in the first component.
Field2D layer_field(const GridSpec& g, const WellPair& wells, double eps, double ripple = 0.0,
                    int modes = 4);

// Pair with separating points 0 and c: the second trace repays its flux deficit with a
// bump on the A side; c is tuned by bisection so that I_eps(psi) = I_eps(phi) + budget.
struct MidpointPair {
  TraceProfile phi, psi;
  double shift = 0.0;
  double I_phi = 0.0, I_psi = 0.0;
};

MidpointPair midpoint_pair(const Potential& w, double eps, double h, double budget = 0.4,
                           int nodes_per_eps = 12);

// Randomized admissible pair for the interpolant postcondition checks: sine transitions
// with random widths, even d1u bumps, centres offset by `max_gap` at most.
struct RandomPair {
  TraceProfile phi, psi;
  double center_phi = 0.0, center_psi = 0.0;
};

RandomPair random_admissible_pair(const WellPair& wells, std::uint64_t seed, double eps,
                                  double max_gap, int nodes = 401);

// ---------------------------------------------------------------------------
// Regression helpers.

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
// Least squares for X c = y via normal equations (small, well-conditioned designs).
std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepTable {
  std::string name;
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json summary = json::object();
  json failures = json::array();
};

std::string table_csv(const SweepTable& t);

// Runs `fn(i)` for i < n on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Kinds: translation_beta, horizontal_delta, midpoint_eps, recovery, combined_random,
// geodesic_points. Parameters come from `spec`, defaults fill the rest.
SweepTable run_named_sweep(const json& spec, std::uint64_t seed, int threads);

struct SweepRun {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> csv;
  std::size_t failed = 0;
};

// Config: {"sweeps": [{"name": ..., "kind": ..., ...}, ...]}. Writes one CSV per sweep and
// manifest.json; all files are written atomically.
SweepRun run_sweep(const json& config, const std::filesystem::path& out_dir, std::uint64_t seed,
                   int threads);

std::uint64_t fnv1a(const std::string& text);

extern const char* const kVersion;

}  // namespace dgmm
