#include "dgmm/verify.hpp"

#include <cmath>
#include <limits>

#include "dgmm/error.hpp"

namespace dgmm {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 3;
    case Verdict::Indeterminate: return 2;
  }
  return 2;
}

json tagged(double value, const std::string& source) {
  json j{{"source", source}};
  if (std::isfinite(value))
    j["value"] = value;
  else
    j["value"] = nullptr;
  return j;
}

json CertificateReport::to_json() const {
  return {{"sigma", tagged(sigma, "estimate_perturbation_sigma")},
          {"chain_factor", tagged(chain_factor, "certify_perturbation_class")},
          {"certified", certified},
          {"samples_used", tagged(static_cast<double>(samples_used), "generate_samples")}};
}

CertificateReport certify_perturbation_class(const Potential& w, const SampleSpec& samples) {
  const std::vector<Mat2> pts = generate_samples(w.wells(), samples);
  const SigmaEstimate est = estimate_perturbation_sigma(w, pts);
  CertificateReport r;
  r.sigma = est.sigma;
  r.samples_used = est.samples_used;
  r.chain_factor = r.sigma < 1.0 ? (1.0 + r.sigma) / (1.0 - r.sigma)
                                 : std::numeric_limits<double>::infinity();
  r.certified = r.sigma < 0.5;
  return r;
}

Verdict numerical_verdict(double K_upper, double d, double uncertainty) {
  if (K_upper < 3.0 * (d - uncertainty)) return Verdict::Pass;
  if (K_upper >= 3.0 * (d + uncertainty)) return Verdict::Fail;
  return Verdict::Indeterminate;
}

VerifyReport verify_hypothesis(const Potential& w, const json& descriptor,
                               const VerifyOptions& opts) {
  VerifyReport r;
  r.potential = descriptor;
  r.certificate = certify_perturbation_class(w, opts.samples);
  try {
    const ContinuationResult c = solve_profile_continuation(w, opts.continuation);
    r.K_profile = c.profile.energy;
    if (opts.run_cell) r.K_cell = solve_cell(w, opts.grid, std::nullopt, opts.cell).energy;
    r.K_upper = *r.K_profile;
    r.K_source = "solve_profile_continuation";
    if (r.K_cell && *r.K_cell < r.K_upper) {
      r.K_upper = *r.K_cell;
      r.K_source = "solve_cell";
    }
    const Mat2 A = w.wells().A();
    GeodesicOptions g = opts.geodesic;
    g.refine = true;
    const GeodesicResult geo = geodesic_distance(w, -A, A, g);
    r.d_points = geo.d;
    r.d_refined = geo.d_refined;
    r.d = geo.d_extrapolated;
    r.d_uncertainty = geo.uncertainty;
    r.margin = 3.0 * r.d - r.K_upper;
    r.numerical = numerical_verdict(r.K_upper, r.d, r.d_uncertainty);
  } catch (const Error& e) {
    r.error = e.what();
    r.numerical = Verdict::Indeterminate;
  }
  if (r.certificate.certified) {
    r.verdict = Verdict::Pass;
    r.route = "analytic";
  } else {
    r.verdict = r.numerical;
    r.route = "numerical";
  }
  return r;
}

json VerifyReport::to_json() const {
  json j;
  j["potential"] = potential;
  j["K_cell"] = K_cell ? tagged(*K_cell, "solve_cell") : tagged(NAN, "solve_cell");
  j["K_profile"] = K_profile ? tagged(*K_profile, "solve_profile_continuation")
                             : tagged(NAN, "solve_profile_continuation");
  j["K_upper"] = tagged(K_upper, K_source.empty() ? "verify_hypothesis" : K_source);
  j["d"] = {{"extrapolated", tagged(d, "geodesic_distance")},
            {"points", tagged(d_points, "geodesic_distance")},
            {"refined", tagged(d_refined, "geodesic_distance")},
            {"uncertainty", tagged(d_uncertainty, "geodesic_distance")},
            // No certified lower bound is computed.
            {"interval_lower_bound", nullptr}};
  j["margin"] = tagged(margin, "verify_hypothesis");
  j["numerical_verdict"] = verdict_name(numerical);
  j["certificate"] = certificate.to_json();
  j["verdict"] = verdict_name(verdict);
  j["route"] = route;
  if (!error.empty()) j["error"] = error;
  return j;
}

}  // namespace dgmm
