#include "dgmm/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace dgmm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct LineProbe {
  const Objective& f;
  const std::vector<double>& x0;
  const std::vector<double>& dir;
  std::vector<double> x;
  std::vector<double> g;
  int evals = 0;
  double last_f = 0.0;

  // Returns phi(t) and phi'(t); leaves x, g at the probed point.
  std::pair<double, double> operator()(double t) {
    for (std::size_t i = 0; i < x0.size(); ++i) x[i] = x0[i] + t * dir[i];
    ++evals;
    last_f = f(x, g);
    return {last_f, dot(g, dir)};
  }
};

double cubic_min(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return 0.5 * (a + b);
  return t;
}

// Strong-Wolfe line search (bracketing + zoom). Returns the accepted step or 0.
double wolfe_search(LineProbe& probe, double f0, double d0, double t_init) {
  constexpr double c1 = 1e-4, c2 = 0.9;
  constexpr int kMaxBracket = 40, kMaxZoom = 40;
  double t_prev = 0.0, f_prev = f0, d_prev = d0;
  double t = t_init;

  auto zoom = [&](double lo, double flo, double dlo, double hi, double fhi, double dhi) {
    for (int it = 0; it < kMaxZoom; ++it) {
      const double tj = cubic_min(lo, flo, dlo, hi, fhi, dhi);
      auto [fj, dj] = probe(tj);
      if (fj > f0 + c1 * tj * d0 || fj >= flo) {
        hi = tj, fhi = fj, dhi = dj;
      } else {
        if (std::abs(dj) <= -c2 * d0) return tj;
        if (dj * (hi - lo) >= 0.0) hi = lo, fhi = flo, dhi = dlo;
        lo = tj, flo = fj, dlo = dj;
      }
      if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    // Accept the best sufficient-decrease point found, if any.
    if (lo > 0.0 && flo < f0) {
      probe(lo);
      return lo;
    }
    return 0.0;
  };

  for (int it = 0; it < kMaxBracket; ++it) {
    auto [ft, dt] = probe(t);
    if (!std::isfinite(ft)) {
      t = 0.5 * (t_prev + t);
      continue;
    }
    if (ft > f0 + c1 * t * d0 || (it > 0 && ft >= f_prev))
      return zoom(t_prev, f_prev, d_prev, t, ft, dt);
    if (std::abs(dt) <= -c2 * d0) return t;
    if (dt >= 0.0) return zoom(t, ft, dt, t_prev, f_prev, d_prev);
    t_prev = t, f_prev = ft, d_prev = dt;
    t *= 2.0;
  }
  return 0.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x, const LbfgsOptions& opts) {
  const std::size_t n = x.size();
  LbfgsResult res;
  std::vector<double> g(n), dir(n);
  res.f = f(x, g);
  res.evaluations = 1;
  if (n == 0) {
    res.converged = true;
    res.reason = "empty";
    return res;
  }

  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  std::vector<double> history{res.f};
  std::vector<double> alpha(static_cast<std::size_t>(opts.memory));
  bool retried = false;

  for (int k = 0; k < opts.max_iterations; ++k) {
    if (inf_norm(g) <= opts.grad_tol) {
      res.converged = true;
      res.reason = "gradient";
      return res;
    }
    // Two-loop recursion.
    dir = g;
    for (std::size_t j = S.size(); j-- > 0;) {
      alpha[j] = rho[j] * dot(S[j], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[j] * Y[j][i];
    }
    double gamma = 1.0;
    if (!S.empty()) gamma = dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
    for (double& v : dir) v *= gamma;
    for (std::size_t j = 0; j < S.size(); ++j) {
      const double b = rho[j] * dot(Y[j], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += S[j][i] * (alpha[j] - b);
    }
    for (double& v : dir) v = -v;
    double d0 = dot(g, dir);
    if (!(d0 < 0.0)) {
      S.clear(), Y.clear(), rho.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      d0 = dot(g, dir);
    }
    double t_init = 1.0;
    if (S.empty()) t_init = std::min(1.0, 1.0 / std::max(inf_norm(g), 1e-300));

    LineProbe probe{f, x, dir, std::vector<double>(n), std::vector<double>(n)};
    const double t = wolfe_search(probe, res.f, d0, t_init);
    res.evaluations += probe.evals;
    if (t == 0.0) {
      if (!S.empty() && !retried) {
        S.clear(), Y.clear(), rho.clear();
        retried = true;
        --k;
        continue;
      }
      res.converged = true;
      res.stalled = true;
      res.reason = "line search stalled";
      return res;
    }
    retried = false;
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = probe.x[i] - x[i];
      y[i] = probe.g[i] - g[i];
    }
    x.swap(probe.x);
    g.swap(probe.g);
    res.f = probe.last_f;
    const double sy = dot(s, y);
    if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) S.pop_front(), Y.pop_front(), rho.pop_front();
    }
    res.iterations = k + 1;

    history.push_back(res.f);

    const int kk = static_cast<int>(history.size()) - 1;
    if (res.iterations >= opts.min_iterations && kk >= 1) {
      const int w = std::min(kk, opts.window);
      const double prev = history[static_cast<std::size_t>(kk - w)];
      const double scale = std::max(std::abs(res.f), std::numeric_limits<double>::min());
      if ((prev - res.f) / scale < opts.rel_tol) {
        res.converged = true;
        res.reason = "relative decrease";
        return res;
      }
    }
  }
  res.reason = "max iterations";
  return res;
}

}  // namespace dgmm
