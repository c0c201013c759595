#pragma once

#include <limits>

#include "relcm/core.hpp"

namespace relcm {

struct QuadResult {
  cx value;
  double err_estimate = 0.0;
  long evaluations = 0;
};

struct ContourSpec {
  cx center;
  double radius = 0.5;
  int points = 64;
};

using RealFn = std::function<cx(double)>;
using ComplexFn = std::function<cx(cx)>;

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1]
inline constexpr double gl16_x[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr double gl16_w[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

}  // namespace detail

struct Grid1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

inline Grid1D make_gl_grid(double a, double b, int panels) {
  Grid1D g;
  g.nodes.reserve(16 * panels);
  g.weights.reserve(16 * panels);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h, s = 0.5 * h;
    for (int j = 7; j >= 0; --j) {
      g.nodes.push_back(c - s * detail::gl16_x[j]);
      g.weights.push_back(s * detail::gl16_w[j]);
    }
    for (int j = 0; j < 8; ++j) {
      g.nodes.push_back(c + s * detail::gl16_x[j]);
      g.weights.push_back(s * detail::gl16_w[j]);
    }
  }
  return g;
}

inline cx integrate_on_grid(const RealFn& f, const Grid1D& g) {
  cx acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g.weights[i] * f(g.nodes[i]);
  return acc;
}

// Composite Gauss-Legendre on [a, b] with panel doubling until two successive
// levels agree within tol.
inline QuadResult integrate_gl_adaptive(const RealFn& f, double a, double b, double tol,
                                        int panels0 = 2, int max_panels = 1 << 15) {
  if (!(tol > 0.0)) throw InvalidParameter("integrate_gl_adaptive: tol must be positive");
  long evals = 0;
  double mass = 0.0;  // integral of |f|, sets the round-off floor
  auto level = [&](int panels) {
    Grid1D g = make_gl_grid(a, b, panels);
    cx acc = 0.0;
    mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      cx v = f(g.nodes[i]);
      if (!is_finite(v)) throw NonFiniteValue("integrate_gl_adaptive: non-finite integrand");
      acc += g.weights[i] * v;
      mass += g.weights[i] * std::abs(v);
    }
    evals += static_cast<long>(g.size());
    return acc;
  };
  cx prev = level(panels0);
  for (int panels = 2 * panels0; panels <= max_panels; panels *= 2) {
    cx cur = level(panels);
    double delta = std::abs(cur - prev);
    double floor = 4e-15 * mass;  // cancellation noise of the weighted sum
    if (delta <= std::max(0.5 * tol, floor))
      return {cur, std::max(delta, 4e-16 * (std::abs(cur) + 1e-300)), evals};
    prev = cur;
  }
  throw NonConvergence("integrate_gl_adaptive: panel doubling failed to stabilize within tol");
}

// Line integral of an exponentially decaying integrand: |f(x)| <= C e^{-d|x|}
// beyond a finite core. Double-exponential substitution x = alpha sinh(u),
// then trapezoid doubling in u (spectrally accurate for analytic f).
inline QuadResult integrate_real_line(const RealFn& f, double decay_rate, double tol) {
  if (!(decay_rate > 0.0)) throw InvalidDecay("integrate_real_line: decay_rate must be positive");
  if (!(tol > 0.0)) throw InvalidParameter("integrate_real_line: tol must be positive");
  long evals = 0;
  auto F = [&](double x) {
    cx v = f(x);
    ++evals;
    if (!is_finite(v)) throw NonFiniteValue("integrate_real_line: non-finite integrand");
    return v;
  };

  // truncation radius: grow until the sampled edge magnitude makes the
  // dropped tail (~|f(X)|/d) smaller than tol/10
  double X = std::max(1.0, 6.0 / decay_rate);
  const double Xcap = std::max(2e4, 2e4 / decay_rate);
  auto edge = [&](double R) {
    double m = 0.0;
    for (double off : {0.0, 0.23 / decay_rate, 0.57 / decay_rate})
      m = std::max({m, std::abs(F(R - off)), std::abs(F(-R + off))});
    return m;
  };
  while (edge(X) > 0.1 * tol * decay_rate && X < Xcap) X *= 1.4;
  if (X >= Xcap) throw NonConvergence("integrate_real_line: integrand tail does not decay");

  // Gauss-Legendre panels in the mapped variable; the origin stays a panel
  // boundary, so an |x|-type kink there does not spoil the convergence.
  const double alpha = std::clamp(1.0 / decay_rate, 1e-3, 1e3);
  const double U = std::asinh(X / alpha);
  auto g = [&](double u) {
    double c = std::cosh(u);
    return F(alpha * std::sinh(u)) * (alpha * c);
  };
  QuadResult q = integrate_gl_adaptive(g, -U, U, tol, 8);
  q.evaluations = evals;
  return q;
}

// (1/2 pi i) times the contour integral of f around spec.center; trapezoid on
// the circle (spectrally accurate for f analytic on the contour).
inline cx residue_numeric(const ComplexFn& f, cx pole, const ContourSpec& spec) {
  (void)pole;  // pole location is the caller's assertion; the contour is spec's
  if (spec.points < 16 || spec.points % 2 != 0)
    throw InvalidParameter("residue_numeric: points must be even and >= 16");
  if (!(spec.radius > 0.0)) throw InvalidParameter("residue_numeric: radius must be positive");
  cx acc = 0.0;
  for (int m = 0; m < spec.points; ++m) {
    double th = 2.0 * pi * (m + 0.5) / spec.points;
    cx dir = std::polar(spec.radius, th);
    cx v = f(spec.center + dir);
    if (!is_finite(v))
      throw ContourThroughSingularity("residue_numeric: integrand not finite on contour");
    acc += v * dir;
  }
  return acc / static_cast<double>(spec.points);
}

}  // namespace relcm
