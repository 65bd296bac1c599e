#include "dgmm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "dgmm/error.hpp"

namespace dgmm {

const char* const kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Families.

TraceProfile heteroclinic_trace(const std::vector<double>& s, const WellPair& wells, double eps) {
  const Vec2 a = wells.a();
  TraceProfile t;
  t.s = s;
  for (double x : s) {
    const double e = std::exp(-std::abs(x) / eps);
    t.u.push_back(a * (std::abs(x) - eps * (1.0 - e)));
    t.d2u.push_back(a * (x < 0.0 ? -(1.0 - e) : (1.0 - e)));
    t.d1u.push_back({0.0, 0.0});
  }
  return t;
}

Field2D layer_field(const GridSpec& g, const WellPair& wells, double eps, double ripple,
                    int modes) {
  Field2D u = Field2D::zeros(g);
  const Vec2 a = wells.a();
  for (int j = 0; j < g.n2; ++j) {
    const double x2 = g.x2(j);
    const double prof = std::abs(x2) - eps * (1.0 - std::exp(-std::abs(x2) / eps));
    const double ch = std::cosh(x2 / eps);
    for (int i = 0; i < g.n1; ++i) {
      const double r = ripple * eps * std::sin(2.0 * std::numbers::pi * modes * g.x1(i)) / (ch * ch);
      u.set(i, j, a * prof + Vec2{r, 0.0});
    }
  }
  return u;
}

MidpointPair midpoint_pair(const Potential& w, double eps, double h, double budget,
                           int nodes_per_eps) {
  if (!(h > 0.0 && h < 0.5 && eps > 0.0 && 4.0 * eps < h))
    throw Error(ErrorKind::InvalidInput, "midpoint pair needs 4 eps < h < 1/2");
  const int n = std::max(201, static_cast<int>(std::ceil(nodes_per_eps / eps)) + 1);
  const std::vector<double> s = uniform_nodes(-0.5, 0.5, n);
  // Width minimizing the sine-profile energy for W0.
  const double width = 2.33 * eps;
  const double bump_half = 0.25 * h;
  const double bump_center = h - bump_half - 0.025 * h;
  const double c_max = bump_center - bump_half - width;
  if (!(c_max > 0.0)) throw Error(ErrorKind::InvalidInput, "h too small for the transition");

  MidpointPair p;
  p.phi = sine_transition_trace(s, w.wells(), 0.0, width);
  p.I_phi = curve_energy_I_eps(p.phi.zeta(), w, eps);
  const double target = p.I_phi + budget;
  auto energy = [&](double c) {
    return curve_energy_I_eps(shifted_compensated_trace(s, w.wells(), width, c, bump_center,
                                                        bump_half).zeta(),
                              w, eps);
  };
  double lo = 0.0, hi = c_max;
  if (energy(hi) <= target) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (energy(mid) <= target ? lo : hi) = mid;
    }
  }
  p.shift = lo;
  p.psi = shifted_compensated_trace(s, w.wells(), width, lo, bump_center, bump_half);
  p.I_psi = curve_energy_I_eps(p.psi.zeta(), w, eps);
  return p;
}

RandomPair random_admissible_pair(const WellPair& wells, std::uint64_t seed, double eps,
                                  double max_gap, int nodes) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };
  const std::vector<double> s = uniform_nodes(-0.5, 0.5, nodes);
  RandomPair p;
  p.center_phi = uni(-1.5, 1.5) * eps;
  p.center_psi = p.center_phi + uni(-1.0, 1.0) * max_gap;
  const double w1 = uni(1.8, 3.0) * eps, w2 = uni(1.8, 3.0) * eps;
  const double k1 = uni(0.0, 0.05), k2 = uni(0.0, 0.05);
  p.phi = sine_transition_trace(s, wells, p.center_phi, w1, k1);
  p.psi = sine_transition_trace(s, wells, p.center_psi, w2, k2);
  return p;
}

// ---------------------------------------------------------------------------
// Regression.

std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y) {
  if (X.empty() || X.size() != y.size()) throw Error(ErrorKind::InvalidInput, "bad regression design");
  const std::size_t p = X[0].size();
  std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < X.size(); ++r)
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) A[i][j] += X[r][i] * X[r][j];
      A[i][p] += X[r][i] * y[r];
    }
  // Gaussian elimination with partial pivoting.
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    if (std::abs(A[c][c]) < 1e-300) throw Error(ErrorKind::InvalidInput, "singular regression design");
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= p; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> coef(p);
  for (std::size_t i = 0; i < p; ++i) coef[i] = A[i][p] / A[i][i];
  return coef;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::vector<double>> X;
  std::vector<double> ly;
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) continue;
    X.push_back({1.0, std::log(x[k])});
    ly.push_back(std::log(y[k]));
  }
  if (X.size() < 2) return std::nan("");
  return least_squares(X, ly)[1];
}

// ---------------------------------------------------------------------------
// Plumbing.

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

std::string table_csv(const SweepTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::vector<double> list(const json& spec, const char* key, std::vector<double> fallback) {
  if (!spec.contains(key)) return fallback;
  const json& v = spec.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

double number(const json& spec, const char* key, double fallback) {
  return spec.value(key, fallback);
}

Potential potential_of(const json& spec) {
  return spec.contains("potential") ? PotentialSpec::from_json(spec.at("potential")).build()
                                    : make_w0(WellPair({0.0, 1.0}));
}

// Evaluates one row per cell concurrently; failed cells are listed instead of written.
void run_cells(SweepTable& t, const std::vector<json>& cells, int threads,
               const std::function<std::vector<double>(const json&)>& eval) {
  std::vector<std::optional<std::vector<double>>> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    try {
      rows[i] = eval(cells[i]);
    } catch (const Error& e) {
      errors[i] = std::string(e.name()) + ": " + e.what();
    } catch (const std::exception& e) {
      errors[i] = std::string("InvalidInput: ") + e.what();
    }
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) {
      t.rows.push_back(*rows[i]);
    } else {
      const std::string& msg = errors[i];
      t.failures.push_back({{"cell", i}, {"params", cells[i]},
                            {"error", msg.substr(0, msg.find(':'))}, {"message", msg}});
    }
  }
}

double column_of(const SweepTable& t, const std::vector<double>& row, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  return row[static_cast<std::size_t>(it - t.columns.begin())];
}

std::vector<double> collect(const SweepTable& t, const std::string& name) {
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(column_of(t, r, name));
  return v;
}

SweepTable translation_beta(const json& spec, int threads) {
  SweepTable t;
  t.columns = {"beta", "eps", "energy", "baseline", "excess"};
  const Potential W = potential_of(spec);
  const double eps = number(spec, "eps", 0.05);
  const double hw = number(spec, "halfwidth", 0.25);
  const int nodes = static_cast<int>(number(spec, "nodes", 201));
  const std::vector<double> betas = list(spec, "beta", {0.02, 0.05, 0.1});
  const TraceProfile phi = heteroclinic_trace(uniform_nodes(-0.5, 0.5, nodes), W.wells(), eps);
  auto energy = [&](double beta) {
    return energy_E_eps(build_translation_interpolant(phi, beta, hw, eps), W, eps).total;
  };
  if (betas.empty()) return t;
  const double base = energy(0.0);
  std::vector<json> cells;
  for (double b : betas) cells.push_back({{"beta", b}});
  run_cells(t, cells, threads, [&](const json& c) {
    const double b = c.at("beta").get<double>();
    const double e = energy(b);
    return std::vector<double>{b, eps, e, base, e - base};
  });
  t.summary["loglog_slope"] = loglog_slope(collect(t, "beta"), collect(t, "excess"));
  t.summary["expected_slope"] = 2.0;
  return t;
}

SweepTable horizontal_delta(const json& spec, int threads) {
  SweepTable t;
  t.columns = {"delta", "eps", "band_energy", "outer_energy", "total_energy", "k_left", "k_right",
               "trace_energy_left", "trace_energy_right"};
  const Potential W = potential_of(spec);
  const double eps = number(spec, "eps", 0.05);
  const double tau = number(spec, "tau", 1.5);
  const int n1 = static_cast<int>(number(spec, "n1", 401));
  const int n2 = static_cast<int>(number(spec, "n2", 201));
  const double ripple = number(spec, "ripple", 0.05);
  const std::vector<double> deltas = list(spec, "delta", {0.2, 0.1, 0.05});
  const GridSpec g = GridSpec::make(n1, n2, -0.5, 0.5, -0.5, 0.5, false);
  const Field2D u = layer_field(g, W.wells(), eps, ripple);
  const double K_ref = number(spec, "K_ref", energy_E_eps(u, W, eps).total);
  std::vector<json> cells;
  for (double d : deltas) cells.push_back({{"delta", d}});
  run_cells(t, cells, threads, [&](const json& c) {
    HorizontalReport rep;
    modify_horizontal(u, W, eps, c.at("delta").get<double>(), tau, K_ref, &rep);
    return std::vector<double>{rep.delta,
                               eps,
                               rep.band_energy,
                               rep.outer_energy,
                               rep.total_energy,
                               static_cast<double>(rep.left.interval_index),
                               static_cast<double>(rep.right.interval_index),
                               rep.left.trace_energy,
                               rep.right.trace_energy};
  });
  t.summary["K_ref"] = K_ref;
  t.summary["loglog_slope"] = loglog_slope(collect(t, "delta"), collect(t, "band_energy"));
  t.summary["expected_slope"] = 1.0;
  // The constant of the band bound degenerates as tau -> 1, so it is only measured on a
  // moderate range.
  if (tau >= 1.25 && tau <= 1.75 && !t.rows.empty()) {
    double c = 0.0;
    for (const auto& r : t.rows) c = std::max(c, column_of(t, r, "band_energy") / column_of(t, r, "delta"));
    t.summary["C_tau"] = c;
  } else {
    t.summary["C_tau"] = nullptr;
  }
  return t;
}

SweepTable midpoint_eps(const json& spec, int threads) {
  SweepTable t;
  t.columns = {"eps", "h", "shift", "distance", "ratio", "I_phi", "I_psi"};
  const Potential W = potential_of(spec);
  const double h = number(spec, "h", 0.4);
  const double budget = number(spec, "budget", 0.4);
  const double tau = number(spec, "tau", 1.5);
  const double K_ref = number(spec, "K_ref", 2.0 * W.wells().a().norm2());
  const std::vector<double> eps_list = list(spec, "eps", {0.04, 0.02, 0.01, 0.005});
  if (eps_list.empty()) return t;
  const Mat2 A = W.wells().A();
  const DistanceContext ctx = make_distance_context(W, -A, A);
  std::vector<json> cells;
  for (double e : eps_list) cells.push_back({{"eps", e}});
  run_cells(t, cells, threads, [&](const json& c) {
    const double eps = c.at("eps").get<double>();
    const MidpointPair p = midpoint_pair(W, eps, h, budget);
    const MidpointReport m = midpoint_bound_check(p.phi, p.psi, h, eps, tau * K_ref, W, ctx);
    return std::vector<double>{eps, h, p.shift, m.distance, m.ratio, m.I_phi, m.I_psi};
  });
  t.summary["loglog_slope"] = loglog_slope(collect(t, "eps"), collect(t, "distance"));
  t.summary["minimum_slope"] = 0.4;
  return t;
}

SweepTable recovery(const json& spec, int threads) {
  SweepTable t;
  t.columns = {"delta", "eps_L", "eps", "h", "energy", "overhead", "wrap_mismatch",
               "interpolant_energy", "beta"};
  const Potential W = potential_of(spec);
  const double tau = number(spec, "tau", 1.5);
  const int n = static_cast<int>(number(spec, "grid", 64));
  const std::vector<double> deltas = list(spec, "delta", {0.2, 0.1, 0.05});
  const std::vector<double> eps_L = list(spec, "eps_L", {1.0, 0.5, 0.25});
  std::vector<json> cells;
  for (double e : eps_L)
    for (double d : deltas) cells.push_back({{"delta", d}, {"eps_L", e}});
  if (cells.empty()) return t;
  const CellSolution cell = solve_cell(W, CellGrid{n, n});
  const Mat2 A = W.wells().A();
  const DistanceContext ctx = make_distance_context(W, -A, A);
  run_cells(t, cells, threads, [&](const json& c) {
    const double sL = c.at("eps_L").get<double>();
    const double eps = sL / cell.scale_L;
    const Field2D z = rescale_to_strip(cell, eps, W.wells());
    // Affine beyond the pinned strips once the stencil clears the free rows.
    const double h = sL * (0.25 + 2.0 * cell.field.grid.h2);
    RecoveryReport rep;
    construct_periodic_recovery(z, W, eps, c.at("delta").get<double>(), tau, h, cell.energy, ctx,
                                &rep);
    return std::vector<double>{rep.delta,      sL,          eps,
                               h,              rep.energy,  rep.overhead,
                               rep.wrap_mismatch, rep.interpolant_energy, rep.interpolant.beta};
  });
  t.summary["K_ref"] = cell.energy;
  t.summary["scale_L"] = cell.scale_L;
  if (t.rows.size() >= 3) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (const auto& r : t.rows) {
      X.push_back({1.0, column_of(t, r, "delta"), std::sqrt(column_of(t, r, "h"))});
      y.push_back(column_of(t, r, "overhead"));
    }
    try {
      const std::vector<double> cf = least_squares(X, y);
      t.summary["fit"] = {{"c0", cf[0]}, {"c_delta", cf[1]}, {"c_sqrt_h", cf[2]}};
    } catch (const Error& e) {
      t.summary["fit_error"] = e.what();
    }
  }
  return t;
}

SweepTable combined_random(const json& spec, std::uint64_t seed, int threads) {
  SweepTable t;
  t.columns = {"seed",          "beta",          "energy",         "left_error",
               "right_error",   "flatness",      "junction_jump",  "junction_gradient_jump",
               "t_left_error",  "t_right_error", "t_flatness",     "m_left_error",
               "m_right_error", "m_flatness"};
  const Potential W = potential_of(spec);
  const double eps = number(spec, "eps", 0.02);
  const double h = number(spec, "h", 0.2);
  const double hw = number(spec, "halfwidth", 0.1);
  const double tau = number(spec, "tau", 1.5);
  const double K_ref = number(spec, "K_ref", 2.0 * W.wells().a().norm2());
  const int count = static_cast<int>(number(spec, "count", 50));
  const double h_tilde = 0.99 * h / std::sqrt(eps);
  std::vector<json> cells;
  for (int k = 0; k < count; ++k) cells.push_back({{"seed", seed + static_cast<std::uint64_t>(k)}});
  if (cells.empty()) return t;
  const Mat2 A = W.wells().A();
  const DistanceContext ctx = make_distance_context(W, -A, A);
  run_cells(t, cells, threads, [&](const json& c) {
    const auto s = c.at("seed").get<std::uint64_t>();
    const RandomPair p = random_admissible_pair(W.wells(), s, eps, 0.25 * h);
    InterpolantReport rc, rt, rm;
    const Field2D f = build_combined_interpolant(p.phi, p.psi, hw, eps, h, h_tilde, tau * K_ref,
                                                 W, ctx, 0.0, &rc);
    build_translation_interpolant(p.phi, rc.beta, hw, eps, 0.0, &rt);
    // Same-midpoint check on a pair that shares phi's centre.
    const RandomPair q = random_admissible_pair(W.wells(), s ^ 0x9e3779b97f4a7c15ULL, eps, 0.0);
    build_same_midpoint_interpolant(q.phi, q.psi, hw, eps, h, tau * K_ref, W, ctx, 0.0, &rm);
    return std::vector<double>{static_cast<double>(s), rc.beta, energy_E_eps(f, W, eps).total,
                               rc.left_trace_error, rc.right_trace_error, rc.flatness,
                               rc.junction_jump, rc.junction_gradient_jump, rt.left_trace_error,
                               rt.right_trace_error, rt.flatness, rm.left_trace_error,
                               rm.right_trace_error, rm.flatness};
  });
  double worst = 0.0, worst_jump = 0.0;
  for (const auto& r : t.rows) {
    for (const char* k : {"left_error", "right_error", "flatness", "junction_gradient_jump",
                          "t_left_error", "t_right_error", "t_flatness", "m_left_error",
                          "m_right_error", "m_flatness"})
      worst = std::max(worst, column_of(t, r, k));
    worst_jump = std::max(worst_jump, column_of(t, r, "junction_jump"));
  }
  t.summary["max_condition_error"] = worst;
  t.summary["max_junction_jump"] = worst_jump;
  return t;
}

SweepTable geodesic_points(const json& spec, int threads) {
  SweepTable t;
  t.columns = {"points", "d", "d_refined", "d_extrapolated", "uncertainty"};
  const Potential W = potential_of(spec);
  const std::vector<double> pts = list(spec, "points", {51, 101, 201});
  std::vector<json> cells;
  for (double p : pts) cells.push_back({{"points", p}});
  const Mat2 A = W.wells().A();
  run_cells(t, cells, threads, [&](const json& c) {
    GeodesicOptions o;
    o.points = static_cast<int>(c.at("points").get<double>());
    const GeodesicResult g = geodesic_distance(W, -A, A, o);
    return std::vector<double>{static_cast<double>(o.points), g.d, g.d_refined, g.d_extrapolated,
                               g.uncertainty};
  });
  return t;
}

}  // namespace

SweepTable run_named_sweep(const json& spec, std::uint64_t seed, int threads) {
  const std::string kind = spec.value("kind", std::string());
  SweepTable t;
  try {
    if (kind == "translation_beta")
      t = translation_beta(spec, threads);
    else if (kind == "horizontal_delta")
      t = horizontal_delta(spec, threads);
    else if (kind == "midpoint_eps")
      t = midpoint_eps(spec, threads);
    else if (kind == "recovery")
      t = recovery(spec, threads);
    else if (kind == "combined_random")
      t = combined_random(spec, spec.value("seed", seed), threads);
    else if (kind == "geodesic_points")
      t = geodesic_points(spec, threads);
    else
      throw Error(ErrorKind::InvalidInput, "unknown sweep kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("sweep parameters: ") + e.what());
  }
  t.kind = kind;
  t.name = spec.value("name", kind);
  return t;
}

SweepRun run_sweep(const json& config, const std::filesystem::path& out_dir, std::uint64_t seed,
                   int threads) {
  if (!config.is_object()) throw Error(ErrorKind::InvalidInput, "sweep config must be an object");
  const json sweeps = config.value("sweeps", json::array());
  if (!sweeps.is_array()) throw Error(ErrorKind::InvalidInput, "\"sweeps\" must be an array");
  SweepRun run;
  json manifest;
  manifest["version"] = kVersion;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  manifest["config_hash"] = hash;
  manifest["seed"] = seed;
  manifest["sweeps"] = json::array();
  manifest["failed"] = json::array();
  for (const json& spec : sweeps) {
    const std::string name = spec.value("name", spec.value("kind", std::string("sweep")));
    try {
      const SweepTable t = run_named_sweep(spec, seed, threads);
      const std::filesystem::path csv = out_dir / (name + ".csv");
      write_file_atomic(csv, table_csv(t));
      run.csv.push_back(csv);
      manifest["sweeps"].push_back({{"name", name},
                                    {"kind", t.kind},
                                    {"csv", csv.filename().string()},
                                    {"rows", t.rows.size()},
                                    {"seed", spec.value("seed", seed)},
                                    {"summary", t.summary}});
      for (const json& f : t.failures) {
        json e = f;
        e["sweep"] = name;
        manifest["failed"].push_back(e);
      }
      run.failed += t.failures.size();
    } catch (const Error& e) {
      manifest["failed"].push_back(
          {{"sweep", name}, {"cell", nullptr}, {"error", e.name()}, {"message", e.what()}});
      ++run.failed;
    }
  }
  run.manifest = out_dir / "manifest.json";
  write_file_atomic(run.manifest, manifest.dump(2) + "\n");
  return run;
}

}  // namespace dgmm
