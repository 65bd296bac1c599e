// dgmm command-line front end. Reports go to --out as JSON; fields use the sidecar
// format of write_field.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "dgmm/cell2d.hpp"
#include "dgmm/curves.hpp"
#include "dgmm/error.hpp"
#include "dgmm/glue.hpp"
#include "dgmm/io.hpp"
#include "dgmm/profile1d.hpp"
#include "dgmm/simd/kernels.hpp"
#include "dgmm/sweep.hpp"
#include "dgmm/verify.hpp"

namespace fs = std::filesystem;
using namespace dgmm;

namespace {

constexpr int kExitInput = 4;

// Config-level defaults; anything given on the command line wins.
struct Settings {
  json config = json::object();
  fs::path out = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  double number(const char* key, double fallback) const { return config.value(key, fallback); }
  std::vector<double> eps_sequence() const {
    return config.value("eps", std::vector<double>{0.2, 0.1, 0.05, 0.025});
  }
};

Settings g_settings;

struct PotentialArg {
  std::string text;
  PotentialSpec spec() const {
    if (text.empty()) {
      if (g_settings.config.contains("potential"))
        return PotentialSpec::from_json(g_settings.config.at("potential"));
      return {};
    }
    if (text.front() == '{') {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("--potential: ") + e.what());
      }
      return PotentialSpec::from_json(j);
    }
    return PotentialSpec::from_name(text);
  }
};

void add_potential(CLI::App* app, PotentialArg& p) {
  app->add_option("--potential", p.text,
                  "w0, w0-soft, scaled-F, perturbed-S-SEED, or a JSON descriptor");
}

CellGrid parse_grid(const std::string& text) {
  if (text.empty()) {
    const int n = static_cast<int>(g_settings.number("grid", 64));
    return {n, n};
  }
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "bad --grid '" + text + "' (use N or N1xN2)");
  }
}

FieldFormat parse_format(const std::string& f) {
  if (f == "csv") return FieldFormat::Csv;
  if (f == "binary") return FieldFormat::Binary;
  throw Error(ErrorKind::InvalidInput, "--format must be csv or binary");
}

void emit(const std::string& name, const json& report) {
  const fs::path path = g_settings.out / (name + ".json");
  write_file_atomic(path, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
}

json with_source(json j, const char* source) {
  j["source"] = source;
  return j;
}

json trace_json(const SliceSelection& s) {
  return with_source({{"s_value", s.s_value},
                      {"column", s.column},
                      {"trace_energy", s.trace_energy},
                      {"interval_index", s.interval_index},
                      {"intervals", s.intervals},
                      {"band_energy", s.band_energy},
                      {"budget", s.budget}},
                     "select_trace_slice");
}

json interpolant_json(const InterpolantReport& r, const char* source) {
  return with_source({{"left_trace_error", r.left_trace_error},
                      {"right_trace_error", r.right_trace_error},
                      {"flatness", r.flatness},
                      {"flat_columns", r.flat_columns},
                      {"beta", r.beta},
                      {"junction_jump", r.junction_jump},
                      {"junction_gradient_jump", r.junction_gradient_jump},
                      {"offset", r.offset},
                      {"s_phi", r.s_phi},
                      {"s_psi", r.s_psi},
                      {"doubled_tail", r.doubled_tail}},
                     source);
}

json midpoint_json(const MidpointReport& m) {
  return with_source({{"s_phi", m.s_phi},
                      {"s_psi", m.s_psi},
                      {"distance", m.distance},
                      {"ratio", m.ratio},
                      {"I_phi", m.I_phi},
                      {"I_psi", m.I_psi},
                      {"alpha", m.alpha}},
                     "midpoint_bound_check");
}

json cell_json(const CellSolution& c) {
  return with_source({{"energy", c.energy},
                      {"scale_L", c.scale_L},
                      {"E_W", c.E_W},
                      {"E_H", c.E_H},
                      {"lower_offset", {c.lower_offset.x, c.lower_offset.y}},
                      {"iterations", c.iterations}},
                     "solve_cell");
}

// --- subcommands -----------------------------------------------------------

struct PotentialCheckArgs {
  PotentialArg potential;
};

int run_potential_check(const PotentialCheckArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  const std::vector<Mat2> pts = generate_samples(w.wells());
  json r;
  r["potential"] = spec.to_json();
  bool ok = true;
  try {
    const GrowthEstimate g = verify_growth(w, pts);
    r["growth"] = with_source({{"C", g.C}, {"samples_used", g.samples_used}, {"violation", g.violation}},
                              "verify_growth");
    ok = !g.violation;
  } catch (const Error& e) {
    r["growth"] = with_source({{"error", e.name()}, {"message", e.what()}}, "verify_growth");
    ok = false;
  }
  const SigmaEstimate s = estimate_perturbation_sigma(w, pts);
  r["sigma"] = with_source({{"sigma", s.sigma}, {"pass", s.pass}, {"samples_used", s.samples_used}},
                           "estimate_perturbation_sigma");
  r["simd"] = simd::isa_name(simd::active_isa());
  r["result"] = ok ? "pass" : "fail";
  emit("potential_check", r);
  return ok ? 0 : 3;
}

struct GeodesicArgs {
  PotentialArg potential;
  int points = 201;
  bool refine = true;
};

int run_geodesic(const GeodesicArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  GeodesicOptions o;
  o.points = a.points;
  o.refine = a.refine;
  o.seed = g_settings.seed;
  const Mat2 A = w.wells().A();
  const GeodesicResult g = geodesic_distance(w, -A, A, o);
  write_file_atomic(g_settings.out / "geodesic.csv", curve_to_csv(g.geodesic));
  const double R = 2.0 * A.norm();
  const json lip = {{"value", lipschitz_constant_estimate(w, R)},
                    {"radius", R},
                    {"source", "lipschitz_constant_estimate"},
                    {"note", "sup of 2 sqrt(W) on B_R(0), R = 2 max(|A|, |B|); balls centred at "
                             "the endpoints are not covered"}};
  emit("geodesic", {{"potential", spec.to_json()},
                    {"lipschitz", lip},
                    {"d", tagged(g.d, "geodesic_distance")},
                    {"d_refined", tagged(g.d_refined, "geodesic_distance")},
                    {"d_extrapolated", tagged(g.d_extrapolated, "geodesic_distance")},
                    {"uncertainty", tagged(g.uncertainty, "geodesic_distance")},
                    {"points", a.points},
                    {"iterations", g.iterations},
                    {"curve", "geodesic.csv"}});
  return 0;
}

struct ProfileArgs {
  PotentialArg potential;
  double half_len = 6.0;
  int points = 600;
  bool continuation = false;
};

int run_profile1d(const ProfileArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  json r{{"potential", spec.to_json()}};
  Profile1D p;
  if (a.continuation) {
    const ContinuationResult c = solve_profile_continuation(w);
    p = c.profile;
    json steps = json::array();
    for (const auto& s : c.trace)
      steps.push_back({{"half_len", s.half_len}, {"n_points", s.n_points}, {"energy", s.energy}});
    r["continuation"] = with_source({{"steps", steps},
                                     {"settled", c.settled},
                                     {"note", "half_len continuation in place of a joint "
                                              "minimum over the length; K is non-increasing "
                                              "in half_len"}},
                                    "solve_profile_continuation");
  } else {
    p = solve_profile_1d(w, a.half_len, a.points);
  }
  const EquipartitionReport eq = equipartition_report(p, w);
  r["K_star"] = tagged(p.energy, a.continuation ? "solve_profile_continuation" : "solve_profile_1d");
  r["half_len"] = p.half_len;
  r["points"] = p.s.size();
  r["equipartition"] = with_source(
      {{"potential_part", eq.potential_part}, {"derivative_part", eq.derivative_part}, {"ratio", eq.ratio}},
      "equipartition_report");
  r["profile"] = "profile.csv";
  write_file_atomic(g_settings.out / "profile.csv", profile_to_csv(p));
  emit("profile1d", r);
  return 0;
}

struct CellArgs {
  PotentialArg potential;
  std::string grid;
  std::string init = "default";
  double ripple = 0.05;
  std::string format = "csv";
};

int run_cell2d(const CellArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  const CellGrid grid = parse_grid(a.grid);
  const FieldFormat fmt = parse_format(a.format);
  std::optional<Field2D> init;
  CellSolveOptions opts;
  if (a.init == "ripple") {
    opts.init.ripple = a.ripple;
    opts.init.seed = g_settings.seed;
  } else if (a.init != "default") {
    init = read_field(a.init);
  }
  const CellSolution c = solve_cell(w, grid, init, opts);
  json meta{{"potential", spec.to_json()}, {"wells", {w.wells().a().x, w.wells().a().y}},
            {"scale_L", c.scale_L}, {"energy", c.energy}};
  write_field(g_settings.out / "cell", c.field, meta, fmt);
  json r = cell_json(c);
  r["strip_violation"] = strip_violation(c.field, w.wells());
  emit("cell2d", {{"potential", spec.to_json()},
                  {"grid", {grid.n1, grid.n2}},
                  {"init", a.init},
                  {"K_per", tagged(c.energy, "solve_cell")},
                  {"cell", r},
                  {"field", "cell.json"}});
  return 0;
}

struct GlueArgs {
  PotentialArg potential;
  std::string construct;
  std::optional<double> eps, eps_L, delta, tau, h, h_tilde, K_ref, beta, halfwidth, gap;
  std::string input;  // cell field sidecar for recovery
  std::string grid;
  int nodes = 401;
  std::string format = "csv";
};

int run_glue(const GlueArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  const FieldFormat fmt = parse_format(a.format);
  const double tau = a.tau.value_or(g_settings.number("tau", 1.5));
  const double h = a.h.value_or(g_settings.number("h", 0.2));
  const double delta = a.delta.value_or(g_settings.number("delta", 0.1));
  const double eps = a.eps.value_or(g_settings.eps_sequence().back());
  const double hw = a.halfwidth.value_or(0.25);
  const Mat2 A = w.wells().A();
  json r{{"potential", spec.to_json()}, {"construct", a.construct}, {"eps", eps}};
  json meta{{"potential", spec.to_json()}, {"eps", eps}, {"construct", a.construct}};
  Field2D field;

  if (a.construct == "translate") {
    const double beta = a.beta.value_or(0.05);
    const TraceProfile phi = heteroclinic_trace(uniform_nodes(-0.5, 0.5, a.nodes), w.wells(), eps);
    InterpolantReport rep;
    field = build_translation_interpolant(phi, beta, hw, eps, 0.0, &rep);
    r["interpolant"] = interpolant_json(rep, "build_translation_interpolant");
    r["energy"] = tagged(energy_E_eps(field, w, eps).total, "energy_E_eps");
  } else if (a.construct == "midpoint" || a.construct == "combined") {
    const double K = tau * a.K_ref.value_or(2.0 * w.wells().a().norm2());
    const DistanceContext ctx = make_distance_context(w, -A, A);
    const double gap = a.construct == "midpoint" ? 0.0 : a.gap.value_or(0.25 * h);
    const RandomPair p = random_admissible_pair(w.wells(), g_settings.seed, eps, gap, a.nodes);
    InterpolantReport rep;
    if (a.construct == "midpoint") {
      field = build_same_midpoint_interpolant(p.phi, p.psi, hw, eps, h, K, w, ctx, 0.0, &rep);
      r["interpolant"] = interpolant_json(rep, "build_same_midpoint_interpolant");
    } else {
      const double ht = a.h_tilde.value_or(0.99 * h / std::sqrt(eps));
      field = build_combined_interpolant(p.phi, p.psi, hw, eps, h, ht, K, w, ctx, 0.0, &rep);
      r["interpolant"] = interpolant_json(rep, "build_combined_interpolant");
      r["h_tilde"] = ht;
    }
    r["pair"] = with_source({{"center_phi", p.center_phi}, {"center_psi", p.center_psi},
                             {"seed", g_settings.seed}},
                            "random_admissible_pair");
    r["energy"] = tagged(energy_E_eps(field, w, eps).total, "energy_E_eps");
  } else if (a.construct == "recovery") {
    CellSolution cell;
    if (!a.input.empty()) {
      cell = evaluate_cell(read_field(a.input), w);
    } else {
      cell = solve_cell(w, parse_grid(a.grid));
    }
    // x1 = -+1/2 must be nodes of the rescaled grid: eps L = n1 / N with N even.
    const double sL_req = a.eps_L.value_or(eps * cell.scale_L);
    const int n1 = cell.field.grid.n1;
    const long N = 2 * std::max(1L, std::lround(n1 / (2.0 * sL_req)));
    if (N < n1) throw Error(ErrorKind::InvalidInput, "eps L must not exceed 1");
    const double eps_used = static_cast<double>(n1) / static_cast<double>(N) / cell.scale_L;
    r["eps_requested"] = a.eps_L ? sL_req / cell.scale_L : eps;
    r["eps"] = eps_used;
    meta["eps"] = eps_used;
    const Field2D z = rescale_to_strip(cell, eps_used, w.wells());
    const DistanceContext ctx = make_distance_context(w, -A, A);
    const double K_ref = a.K_ref.value_or(cell.energy);
    RecoveryReport rep;
    RecoveryOptions ro;
    if (a.h_tilde) ro.h_tilde = *a.h_tilde;
    try {
      field = construct_periodic_recovery(z, w, eps_used, delta, tau, h, K_ref, ctx, &rep, ro);
    } catch (const Error&) {
      r["stage"] = rep.stage;
      emit("glue", r);
      throw;
    }
    r["cell"] = cell_json(cell);
    r["eps_L"] = eps_used * cell.scale_L;
    r["recovery"] = with_source(
        {{"delta", rep.delta}, {"h", rep.h}, {"h_tilde", rep.h_tilde},
         {"M1", {rep.M1_x, rep.M1_y}}, {"M2", {rep.M2_x, rep.M2_y}},
         {"wrap_mismatch", rep.wrap_mismatch}, {"junction_jump", rep.junction_jump},
         {"energy", rep.energy}, {"interpolant_energy", rep.interpolant_energy},
         {"overhead", rep.overhead}, {"stage", rep.stage},
         {"left_trace", trace_json(rep.horizontal.left)},
         {"right_trace", trace_json(rep.horizontal.right)},
         {"midpoint", midpoint_json(rep.midpoint)},
         {"interpolant", interpolant_json(rep.interpolant, "build_combined_interpolant")}},
        "construct_periodic_recovery");
  } else {
    throw Error(ErrorKind::InvalidInput,
                "--construct must be translate, midpoint, combined or recovery");
  }
  write_field(g_settings.out / "glue", field, meta, fmt);
  r["field"] = "glue.json";
  emit("glue", r);
  return 0;
}

struct VerifyArgs {
  PotentialArg potential;
  std::string grid;
  bool no_cell = false;
  int points = 201;
};

int run_verify(const VerifyArgs& a) {
  const PotentialSpec spec = a.potential.spec();
  const Potential w = spec.build();
  VerifyOptions o;
  o.grid = parse_grid(a.grid);
  o.run_cell = !a.no_cell;
  o.geodesic.points = a.points;
  const VerifyReport r = verify_hypothesis(w, spec.to_json(), o);
  emit("verify", r.to_json());
  return exit_code(r.verdict);
}

// The default matrix reproduces the acceptance sweeps.
json default_sweeps() {
  const Settings& s = g_settings;
  json sw = json::array();
  sw.push_back({{"name", "translation_beta"}, {"kind", "translation_beta"}});
  sw.push_back({{"name", "horizontal_delta"}, {"kind", "horizontal_delta"},
                {"tau", s.number("tau", 1.5)}});
  sw.push_back({{"name", "midpoint_eps"}, {"kind", "midpoint_eps"}, {"tau", s.number("tau", 1.5)}});
  sw.push_back({{"name", "combined_random"}, {"kind", "combined_random"},
                {"h", s.number("h", 0.2)}, {"tau", s.number("tau", 1.5)}});
  sw.push_back({{"name", "recovery"}, {"kind", "recovery"}, {"tau", s.number("tau", 1.5)},
                {"grid", s.number("grid", 64)}});
  return sw;
}

int run_sweep_cmd() {
  json config = g_settings.config;
  if (!config.contains("sweeps")) config["sweeps"] = default_sweeps();
  const SweepRun run = run_sweep(config, g_settings.out, g_settings.seed, g_settings.threads);
  std::cout << read_file(run.manifest);
  return run.failed == 0 ? 0 : 3;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidBounds:
      return kExitInput;
    case ErrorKind::NoConvergence:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recovery constructions and hypothesis checks for two-well H^2 energies"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "JSON config document")->check(CLI::ExistingFile);
  app.add_option("--out", g_settings.out, "output directory");
  app.add_option("--seed", g_settings.seed, "seed for randomized inputs");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);

  auto* pot = app.add_subcommand("potential", "potential diagnostics");
  pot->require_subcommand(1);
  PotentialCheckArgs pc;
  auto* check = pot->add_subcommand("check", "growth constant and perturbation sigma");
  add_potential(check, pc.potential);

  GeodesicArgs ga;
  auto* geo = app.add_subcommand("geodesic", "geodesic distance between the wells");
  add_potential(geo, ga.potential);
  geo->add_option("--points", ga.points, "curve nodes")->check(CLI::Range(3, 100000));
  geo->add_flag("!--no-refine", ga.refine, "skip the 2P-1 refinement");

  ProfileArgs pa;
  auto* prof = app.add_subcommand("profile1d", "1D cell constant");
  add_potential(prof, pa.potential);
  prof->add_option("--half-len", pa.half_len, "half length of the 1D domain");
  prof->add_option("--points", pa.points, "nodes")->check(CLI::Range(3, 1000000));
  prof->add_flag("--continuation", pa.continuation, "grow half_len until K_* settles");

  CellArgs ca;
  auto* cell = app.add_subcommand("cell2d", "periodic cell problem");
  add_potential(cell, ca.potential);
  cell->add_option("--grid", ca.grid, "N or N1xN2");
  cell->add_option("--init", ca.init, "default, ripple, or a field sidecar path");
  cell->add_option("--ripple", ca.ripple, "ripple amplitude for --init ripple");
  cell->add_option("--format", ca.format, "csv or binary");

  GlueArgs gl;
  auto* glue = app.add_subcommand("glue", "interpolants and the periodic recovery");
  glue->set_help_flag("--help", "Print this help message and exit");
  add_potential(glue, gl.potential);
  glue->add_option("--construct", gl.construct, "translate, midpoint, combined, recovery")
      ->required();
  glue->add_option("--eps", gl.eps, "epsilon");
  glue->add_option("--eps-L", gl.eps_L, "recovery: eps times the cell scale L");
  glue->add_option("--delta", gl.delta, "horizontal modification width");
  glue->add_option("--tau", gl.tau, "energy slack factor");
  glue->add_option("--h", gl.h, "tail parameter");
  glue->add_option("--h-tilde", gl.h_tilde, "midpoint gate constant");
  glue->add_option("--K-ref", gl.K_ref, "reference upper bound for K*");
  glue->add_option("--beta", gl.beta, "translation shift");
  glue->add_option("--halfwidth", gl.halfwidth, "interpolant half width");
  glue->add_option("--gap", gl.gap, "max separating-point gap of the random pair");
  glue->add_option("--nodes", gl.nodes, "trace nodes")->check(CLI::Range(5, 1000000));
  glue->add_option("--input", gl.input, "cell field sidecar (recovery)");
  glue->add_option("--grid", gl.grid, "cell grid when no --input is given");
  glue->add_option("--format", gl.format, "csv or binary");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check K* < 3 d_W(A, B)");
  add_potential(ver, va.potential);
  ver->add_option("--grid", va.grid, "cell grid");
  ver->add_flag("--no-cell", va.no_cell, "use only the 1D bound for K_upper");
  ver->add_option("--points", va.points, "geodesic nodes")->check(CLI::Range(3, 100000));

  auto* sweep = app.add_subcommand("sweep", "run the config's experiment matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    g_settings.threads = threads;
    if (!config_path.empty()) {
      try {
        g_settings.config = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("config: ") + e.what());
      }
      if (!g_settings.config.is_object())
        throw Error(ErrorKind::InvalidInput, "config must be a JSON object");
    }
    if (*check) return run_potential_check(pc);
    if (*geo) return run_geodesic(ga);
    if (*prof) return run_profile1d(pa);
    if (*cell) return run_cell2d(ca);
    if (*glue) return run_glue(gl);
    if (*ver) return run_verify(va);
    if (*sweep) return run_sweep_cmd();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
