#pragma once

#include <optional>
#include <string>

#include "dgmm/cell2d.hpp"
#include "dgmm/curves.hpp"
#include "dgmm/io.hpp"
#include "dgmm/profile1d.hpp"

namespace dgmm {

enum class Verdict { Pass, Fail, Indeterminate };

const char* verdict_name(Verdict v);
// 0 pass, 3 fail, 2 indeterminate.
int exit_code(Verdict v);

// A number together with the operation that produced it.
json tagged(double value, const std::string& source);

struct CertificateReport {
  double sigma = 0.0;
  double chain_factor = 0.0;  // (1 + sigma) / (1 - sigma); infinite for sigma >= 1
  bool certified = false;     // sigma < 1/2
  std::size_t samples_used = 0;

  json to_json() const;
};

CertificateReport certify_perturbation_class(const Potential& w, const SampleSpec& samples = {});

struct VerifyOptions {
  CellGrid grid;
  bool run_cell = true;
  CellSolveOptions cell;
  ContinuationOptions continuation;
  GeodesicOptions geodesic;
  SampleSpec samples;
};

struct VerifyReport {
  json potential;
  std::optional<double> K_cell;     // K*_per
  std::optional<double> K_profile;  // K_*
  double K_upper = 0.0;
  std::string K_source;
  double d = 0.0;  // extrapolated geodesic value
  double d_points = 0.0, d_refined = 0.0, d_uncertainty = 0.0;
  double margin = 0.0;  // 3 d - K_upper
  Verdict numerical = Verdict::Indeterminate;
  CertificateReport certificate;
  Verdict verdict = Verdict::Indeterminate;
  std::string route;  // "analytic" or "numerical"
  std::string error;  // solver failure, if any

  json to_json() const;
};

// Numerical verdict: pass if K < 3 (d - u), fail if K >= 3 (d + u), otherwise
// indeterminate. Monotone in K at fixed d.
Verdict numerical_verdict(double K_upper, double d, double uncertainty);

VerifyReport verify_hypothesis(const Potential& w, const json& descriptor,
                               const VerifyOptions& opts = {});

}  // namespace dgmm
