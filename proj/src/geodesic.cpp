#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dgmm/curves.hpp"
#include "dgmm/error.hpp"
#include "dgmm/lbfgs.hpp"

namespace dgmm {

namespace {

// Discrete length and its gradient with respect to every node.
double discrete_length(const Potential& w, const std::vector<Mat2>& pts, std::vector<Mat2>* grad) {
  double total = 0.0;
  if (grad) std::fill(grad->begin(), grad->end(), Mat2{});
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Mat2 d = pts[k + 1] - pts[k];
    const Mat2 mid = (pts[k] + pts[k + 1]) * 0.5;
    const double wv = std::max(0.0, w(mid));
    const double sw = std::sqrt(wv);
    const double len = d.norm();
    total += 2.0 * sw * len;
    if (!grad) continue;
    Mat2 g_mid{};
    if (wv > 0.0) g_mid = w.gradient(mid) * (0.5 * len / sw);  // d(2 sqrt W |d|)/d(mid) / 2
    Mat2 g_d{};
    if (len > 0.0) g_d = d * (2.0 * sw / len);
    (*grad)[k] = (*grad)[k] + g_mid - g_d;
    (*grad)[k + 1] = (*grad)[k + 1] + g_mid + g_d;
  }
  return total;
}

void redistribute(std::vector<Mat2>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> arc(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();
  const double total = arc.back();
  if (!(total > 0.0)) return;
  std::vector<Mat2> out(n);
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t j = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (j + 2 < n && arc[j + 1] < target) ++j;
    const double span = arc[j + 1] - arc[j];
    const double lam = span > 0.0 ? (target - arc[j]) / span : 0.0;
    out[k] = pts[j] * (1.0 - lam) + pts[j + 1] * lam;
  }
  pts.swap(out);
}

// Segment lengths more than 50% away from the mean.
bool uneven(const std::vector<Mat2>& pts) {
  double total = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double l = (pts[k] - pts[k - 1]).norm();
    total += l, lo = std::min(lo, l), hi = std::max(hi, l);
  }
  const double mean = total / static_cast<double>(pts.size() - 1);
  return hi > 1.5 * mean || lo < 0.5 * mean;
}

struct Relaxation {
  double length;
  std::vector<Mat2> pts;
  int iterations;
};

Relaxation relax(const Potential& w, std::vector<Mat2> pts, const GeodesicOptions& opts) {
  const std::size_t n = pts.size();
  std::vector<int> entries;
  for (int j = 0; j < 4; ++j)
    if (opts.free_entries[static_cast<std::size_t>(j)]) entries.push_back(j);
  const std::size_t ne = entries.size();
  auto pack = [&](const std::vector<Mat2>& p) {
    std::vector<double> x((n - 2) * ne);
    for (std::size_t k = 1; k + 1 < n; ++k)
      for (std::size_t e = 0; e < ne; ++e) x[(k - 1) * ne + e] = p[k][entries[e]];
    return x;
  };
  auto unpack = [&](std::span<const double> x, std::vector<Mat2>& p) {
    for (std::size_t k = 1; k + 1 < n; ++k)
      for (std::size_t e = 0; e < ne; ++e) p[k].at(entries[e]) = x[(k - 1) * ne + e];
  };

  std::vector<Mat2> work = pts, grad(n);
  Objective f = [&](std::span<const double> x, std::span<double> g) {
    unpack(x, work);
    const double v = discrete_length(w, work, &grad);
    for (std::size_t k = 1; k + 1 < n; ++k)
      for (std::size_t e = 0; e < ne; ++e) g[(k - 1) * ne + e] = grad[k][entries[e]];
    return v;
  };
  // Redistribution perturbs the length at roughly the 1e-10 level, which defeats a strict
  // stop test. It therefore runs between cycles only until the length settles, and a
  // final uninterrupted run does the fine convergence.
  constexpr double kSettled = 1e-8;
  LbfgsOptions lo;
  lo.rel_tol = opts.rel_tol;
  lo.grad_tol = 1e-12;
  std::vector<double> x = pack(pts);
  int used = 0;
  if (opts.redistribute_every > 0) {
    // Near a zero of W the optimal discrete curve can have a corner that resampling keeps
    // undoing; the phase then ends after a few cycles without improvement.
    constexpr int kPatience = 5;
    double prev = discrete_length(w, pts, nullptr), best = prev;
    std::vector<double> best_x = x;
    int idle = 0;
    while (used < opts.max_iterations / 2) {
      lo.max_iterations = opts.redistribute_every;
      const LbfgsResult r = lbfgs_minimize(f, x, lo);
      used += std::max(1, r.iterations);
      unpack(x, pts);
      const double now = discrete_length(w, pts, nullptr);
      const bool settled = r.converged || std::abs(prev - now) <= kSettled * std::abs(now);
      prev = now;
      if (now < best) {
        best = now, best_x = x, idle = 0;
      } else if (++idle >= kPatience) {
        x = best_x;
        break;
      }
      if (settled) break;
      if (uneven(pts)) {
        redistribute(pts);
        x = pack(pts);
        prev = discrete_length(w, pts, nullptr);
      }
    }
  }
  lo.max_iterations = std::max(1, opts.max_iterations - used);
  const LbfgsResult r = lbfgs_minimize(f, x, lo);
  if (!r.converged)
    throw Error(ErrorKind::NoConvergence, "geodesic relaxation did not converge (" + r.reason +
                                              ", " + std::to_string(used + r.iterations) +
                                              " iterations)");
  unpack(x, pts);
  return {discrete_length(w, pts, nullptr), pts, used + r.iterations};
}

Curve to_curve(const std::vector<Mat2>& pts) {
  Curve c = Curve::segment(pts.front(), pts.back(), pts.size());
  c.m = pts;
  return c;
}

}  // namespace

GeodesicResult geodesic_distance(const Potential& w, const Mat2& from, const Mat2& to,
                                 const GeodesicOptions& opts) {
  if (opts.points < 3) throw Error(ErrorKind::InvalidInput, "geodesic needs at least 3 points");
  if (from == to) {
    GeodesicResult r;
    r.geodesic = Curve::segment(from, to, static_cast<std::size_t>(opts.points));
    return r;
  }
  const std::size_t P = static_cast<std::size_t>(opts.points);
  std::vector<Mat2> pts = Curve::segment(from, to, P).m;
  if (opts.init_perturbation != 0.0) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    double coef[4][3];
    for (auto& row : coef)
      for (double& c : row) c = nd(rng);
    for (std::size_t k = 1; k + 1 < P; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(P - 1);
      for (int j = 0; j < 4; ++j) {
        if (!opts.free_entries[static_cast<std::size_t>(j)]) continue;
        double v = 0.0;
        for (int q = 1; q <= 3; ++q) v += coef[j][q - 1] * std::sin(q * std::numbers::pi * t) / q;
        pts[k].at(j) += opts.init_perturbation * v;
      }
    }
  }

  Relaxation coarse = relax(w, pts, opts);
  GeodesicResult res;
  res.d = coarse.length;
  res.iterations = coarse.iterations;
  res.geodesic = to_curve(coarse.pts);
  res.d_refined = res.d;
  res.d_extrapolated = res.d;
  if (opts.refine) {
    std::vector<Mat2> fine(2 * P - 1);
    for (std::size_t k = 0; k < P; ++k) {
      fine[2 * k] = coarse.pts[k];
      if (k + 1 < P) fine[2 * k + 1] = (coarse.pts[k] + coarse.pts[k + 1]) * 0.5;
    }
    Relaxation refined = relax(w, fine, opts);
    res.d_refined = refined.length;
    res.d_extrapolated = refined.length + (refined.length - coarse.length) / 3.0;
    res.iterations += refined.iterations;
  }
  res.uncertainty = std::abs(res.d - res.d_refined);
  return res;
}

double lipschitz_constant_estimate(const Potential& w, double radius, std::size_t n_samples) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidInput, "radius must be positive");
  const std::vector<Mat2> samples = ball_samples(radius, n_samples / 2, n_samples - n_samples / 2);
  std::vector<std::pair<double, Mat2>> best;
  best.reserve(samples.size());
  for (const Mat2& m : samples) best.emplace_back(w(m), m);
  const std::size_t keep = std::min<std::size_t>(8, best.size());
  std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(keep), best.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double sup = best.empty() ? 0.0 : best.front().first;
  for (std::size_t i = 0; i < keep; ++i) {
    Mat2 m = best[i].second;
    double v = best[i].first;
    double step = 0.1 * radius;
    for (int it = 0; it < 200 && step > 1e-12 * radius; ++it) {
      const Mat2 g = w.gradient(m);
      const double gn = g.norm();
      if (gn == 0.0) break;
      Mat2 trial = m + g * (step / gn);
      const double r = trial.norm();
      if (r > radius) trial = trial * (radius / r);
      const double tv = w(trial);
      if (tv > v) {
        m = trial, v = tv;
      } else {
        step *= 0.5;
      }
    }
    sup = std::max(sup, v);
  }
  return 2.0 * std::sqrt(sup);
}

DistanceContext make_distance_context(const Potential& w, const Mat2& from, const Mat2& to,
                                      const GeodesicOptions& opts) {
  DistanceContext ctx;
  const GeodesicResult g = geodesic_distance(w, from, to, opts);
  ctx.d = g.d;
  ctx.uncertainty = g.uncertainty;
  ctx.radius = 2.0 * std::max(from.norm(), to.norm());
  ctx.lip_d = lipschitz_constant_estimate(w, ctx.radius);
  return ctx;
}

}  // namespace dgmm
