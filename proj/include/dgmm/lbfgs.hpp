#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dgmm {

struct LbfgsOptions {
  int max_iterations = 10000;
  int memory = 10;
  // Stop when max |g_i| falls below this.
  double grad_tol = 1e-12;
  // Stop when the relative decrease over the last min(k, window) iterations is below
  // rel_tol, once at least min_iterations steps were taken.
  double rel_tol = 1e-10;
  int window = 10;
  int min_iterations = 2;
};

struct LbfgsResult {
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  // The line search could not decrease f further; typical at machine precision.
  bool stalled = false;
  std::string reason;
};

// f(x, grad) returns the objective and writes its gradient.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x,
                           const LbfgsOptions& opts = {});

}  // namespace dgmm
