#pragma once

#include <Eigen/Dense>
#include <array>

#include "relcm/kernel.hpp"

namespace relcm {

// ---------------------------------------------------------------------------
// smooth compactly supported test functions

struct Bump {
  double center = 0.0, width = 1.0, amplitude = 1.0;
  double operator()(double t) const {
    double s = (t - center) / width;
    double u = 1.0 - s * s;
    if (u <= 0.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / u);
  }
};

struct ComponentFn {
  std::vector<Bump> bumps;
  double operator()(double t) const {
    double acc = 0.0;
    for (const auto& b : bumps) acc += b(t);
    return acc;
  }
  bool empty() const { return bumps.empty(); }
  double lo() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& b : bumps) v = std::min(v, b.center - b.width);
    return v;
  }
  double hi() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& b : bumps) v = std::max(v, b.center + b.width);
    return v;
  }
};

// two-component momentum-side test function, support strictly inside (0, inf)
struct TwoComponentFn {
  ComponentFn plus, minus;
  void validate() const {
    for (const ComponentFn* c : {&plus, &minus})
      if (!c->empty() && c->lo() <= 0.0)
        throw InvalidParameter("TwoComponentFn: support must lie strictly inside (0, inf)");
  }
};

// position-side test function on R
struct PositionFn {
  ComponentFn f;
  double operator()(double r) const { return f(r); }
};

inline std::vector<TwoComponentFn> make_momentum_basis(int per_component = 6) {
  std::vector<TwoComponentFn> basis;
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < per_component; ++i) {
      TwoComponentFn f;
      Bump b{0.95 + 0.42 * i, 0.8 + 0.09 * (i % 3), 1.0};
      if (comp == 0) f.plus.bumps.push_back(b);
      else f.minus.bumps.push_back(b);
      f.validate();
      basis.push_back(f);
    }
  return basis;
}

inline std::vector<PositionFn> make_position_basis(int n = 6) {
  std::vector<PositionFn> basis;
  for (int i = 0; i < n; ++i) {
    PositionFn h;
    h.f.bumps.push_back(Bump{-2.5 + 1.0 * i, 1.25 + 0.15 * (i % 3), 1.0});
    basis.push_back(h);
  }
  return basis;
}

// Composite GL grid whose panel boundaries include every bump edge: the test
// functions are analytic between edges but only C-infinity across them, and
// unaligned panels would cap the quadrature accuracy there.
inline Grid1D make_aligned_grid(double lo, double hi, const std::vector<double>& edges,
                                double width_cap) {
  std::vector<double> cuts{lo, hi};
  for (double e : edges)
    if (e > lo + 1e-12 && e < hi - 1e-12) cuts.push_back(e);
  std::sort(cuts.begin(), cuts.end());
  Grid1D g;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s], b = cuts[s + 1];
    if (b - a < 1e-12) continue;
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width_cap)));
    Grid1D part = make_gl_grid(a, b, panels);
    g.nodes.insert(g.nodes.end(), part.nodes.begin(), part.nodes.end());
    g.weights.insert(g.weights.end(), part.weights.begin(), part.weights.end());
  }
  return g;
}

inline std::vector<double> bump_edges(const std::vector<TwoComponentFn>& basis) {
  std::vector<double> e;
  for (const auto& f : basis)
    for (const ComponentFn* c : {&f.plus, &f.minus})
      for (const auto& b : c->bumps) {
        e.push_back(b.center - b.width);
        e.push_back(b.center + b.width);
      }
  return e;
}
inline std::vector<double> bump_edges(const std::vector<PositionFn>& basis) {
  std::vector<double> e;
  for (const auto& h : basis)
    for (const auto& b : h.f.bumps) {
      e.push_back(b.center - b.width);
      e.push_back(b.center + b.width);
    }
  return e;
}

// Edge-aligned grid whose panel width grows away from the origin: kernel
// weight functions vary on the scale of their nearest pole ordinate only
// within a few pole distances of x = 0, and on the coarse scale beyond.
inline Grid1D make_graded_grid(double lo, double hi, const std::vector<double>& edges,
                               double cap_far, double near_scale) {
  auto cap = [&](double x) {
    double c = std::min(cap_far, std::max(0.45 * near_scale, 0.3 * std::abs(x)));
    return std::max(c, 1e-4 * cap_far);
  };
  std::vector<double> cuts{lo, hi};
  for (double e : edges)
    if (e > lo + 1e-12 && e < hi - 1e-12) cuts.push_back(e);
  if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  Grid1D g;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s], b = cuts[s + 1];
    double x = a;
    while (x < b - 1e-12) {
      double h = std::min(cap(x), b - x);
      // do not leave a sliver at the end of the segment
      if (b - x - h < 0.25 * h) h = b - x;
      Grid1D part = make_gl_grid(x, x + h, 1);
      g.nodes.insert(g.nodes.end(), part.nodes.begin(), part.nodes.end());
      g.weights.insert(g.weights.end(), part.weights.begin(), part.weights.end());
      x += h;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// forward and adjoint transforms (single-point evaluation)

inline cx forward(const KernelSpec& K, const TwoComponentFn& f, double r, double tol = 1e-9) {
  f.validate();
  double lo = std::min(f.plus.empty() ? 1e300 : f.plus.lo(), f.minus.empty() ? 1e300 : f.minus.lo());
  double hi = std::max(f.plus.empty() ? -1e300 : f.plus.hi(), f.minus.empty() ? -1e300 : f.minus.hi());
  auto g = [&](double k) {
    cx acc = 0.0;
    if (!f.plus.empty()) acc += K.psi(r, k) * f.plus(k);
    if (!f.minus.empty()) acc -= K.psi(-r, k) * f.minus(k);
    return acc;
  };
  int p0 = std::max(4, static_cast<int>((hi - lo) * (std::abs(r) + 4.0) / 5.0));
  QuadResult q = integrate_gl_adaptive(g, lo, hi, tol, p0);
  return q.value / std::sqrt(2.0 * pi);
}

inline std::array<cx, 2> adjoint(const KernelSpec& K, const PositionFn& h, double k,
                                 double tol = 1e-9) {
  double lo = h.f.lo(), hi = h.f.hi();
  std::array<cx, 2> out;
  for (int d = 0; d < 2; ++d) {
    double dv = d == 0 ? 1.0 : -1.0;
    auto g = [&](double r) { return K.psi(dv * r, -k) * h(r); };
    int p0 = std::max(4, static_cast<int>((hi - lo) * (std::abs(k) + 4.0) / 5.0));
    QuadResult q = integrate_gl_adaptive(g, lo, hi, tol, p0);
    out[d] = dv * q.value / std::sqrt(2.0 * pi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// residue sums (Gram-defect kernels)

// R_hat_{delta,delta'}(k,k'): the transform is isometric iff these vanish
inline cx residue_sum_forward(const KernelSpec& K, double k, double kp, int delta, int deltap) {
  if (std::abs(k - kp) < 1e-7) {  // evenness cancels the diagonal pole; take a symmetric limit
    double h = 1e-4 * (1.0 + std::abs(k));
    return 0.5 * (residue_sum_forward(K, k, kp + h, delta, deltap) +
                  residue_sum_forward(K, k, kp - h, delta, deltap));
  }
  double dv = delta > 0 ? 1.0 : -1.0, dpv = deltap > 0 ? 1.0 : -1.0;
  cx acc = 0.0;
  for (const auto& pd : K.w_poles) {
    cx rj = pd.location;
    for (int nu : {+1, -1})
      for (int nup : {+1, -1}) {
        double nv = nu, npv = nup;
        cx den = 1.0 - std::exp(K.rho() * (npv * kp - nv * k));
        if (std::abs(den) < 1e-12)
          throw NearPole("residue_sum_forward: off-diagonal denominator zero");
        cx bracket = K.mu(-delta * nu, dv * rj, -k) * K.mu(-deltap * nup, dpv * rj, kp) +
                     K.mu(delta * nu, -dv * rj, -k) * K.mu(deltap * nup, -dpv * rj, kp);
        acc += pd.residue * bracket / den;
      }
  }
  return iu * dv * dpv * acc;
}

// R(r,r'): the adjoint is isometric iff this vanishes
inline cx residue_sum_adjoint(const KernelSpec& K, double r, double rp) {
  if (std::abs(r - rp) < 1e-7) {
    double h = 1e-4 * (1.0 + std::abs(r));
    return 0.5 * (residue_sum_adjoint(K, r, rp + h) + residue_sum_adjoint(K, r, rp - h));
  }
  cx acc = 0.0;
  for (const auto& pd : K.what_poles) {
    cx kj = pd.location;
    for (int tau : {+1, -1})
      for (int taup : {+1, -1}) {
        double tv = tau, tpv = taup;
        cx den = 1.0 - tv * tpv * std::exp(K.kappa() * (tpv * rp - tv * r));
        if (std::abs(den) < 1e-12)
          throw NearPole("residue_sum_adjoint: denominator zero");
        cx Lam = K.lam(tau, r, kj) * K.lam(taup, rp, -kj) +
                 K.lam(-tau, -r, kj) * K.lam(-taup, -rp, -kj);
        acc += pd.residue * Lam / den;
      }
  }
  return iu * K.w_sqrt(r) * K.w_sqrt(rp) * acc;
}

// algebraic identities behind the vanishing of the example residue sums
inline cx identity_id1(cx A, cx Ap) {
  return 1.0 / (1.0 - Ap / A) + 1.0 / (1.0 - A / Ap) - 1.0 / (1.0 - 1.0 / (Ap * A)) -
         1.0 / (1.0 - Ap * A);
}
inline cx identity_id2(cx A, cx Ap, int sigma) {
  double s = sigma > 0 ? 1.0 : -1.0;
  return 1.0 / (1.0 - Ap / A) + (A / Ap) / (1.0 - A / Ap) - (s / Ap) / (1.0 - 1.0 / (Ap * A)) -
         s * A / (1.0 - Ap * A);
}

// ---------------------------------------------------------------------------
// Gram defect measurement

struct DefectReport {
  enum class Side { forward, adjoint };
  Side side = Side::forward;
  std::vector<std::vector<cx>> gram_defect;  // hermitian
  int numerical_rank = 0;
  std::vector<std::pair<std::vector<cx>, double>> factors;  // eigenvector coeffs, eigenvalue
  double quad_tol = 0.0;
  double hermiticity_defect = 0.0;

  double max_entry() const {
    double m = 0.0;
    for (const auto& row : gram_defect)
      for (cx v : row) m = std::max(m, std::abs(v));
    return m;
  }
};

struct GramOptions {
  double tol = 1e-7;        // target entry accuracy
  double extent0 = 24.0;    // first truncation radius (r for forward, k for adjoint)
  double extent_max = 1536.0;
  double rank_rel_tol = 1e-6;  // singular values above rank_rel_tol * sigma_max count
};

namespace detail {

inline void finish_report(DefectReport& rep, const GramOptions& opts) {
  int n = static_cast<int>(rep.gram_defect.size());
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rep.gram_defect[i][j];
  Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
  rep.hermiticity_defect = (M - H).cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rep.gram_defect[i][j] = H(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  double smax = 0.0;
  for (int i = 0; i < n; ++i) smax = std::max(smax, std::abs(es.eigenvalues()[i]));
  rep.numerical_rank = 0;
  for (int i = 0; i < n; ++i) {
    double lam = es.eigenvalues()[i];
    if (std::abs(lam) > opts.rank_rel_tol * smax) {
      ++rep.numerical_rank;
      std::vector<cx> vec(n);
      for (int j = 0; j < n; ++j) vec[j] = es.eigenvectors()(j, i);
      rep.factors.emplace_back(std::move(vec), lam);
    }
  }
}

}  // namespace detail

// <T f_i, T f_j> - <f_i, f_j> with T = forward transform, on a momentum basis
inline DefectReport gram_defect_forward(const KernelSpec& K,
                                        const std::vector<TwoComponentFn>& basis,
                                        const GramOptions& opts = {}) {
  const int n = static_cast<int>(basis.size());
  double klo = 1e300, khi = -1e300;
  for (const auto& f : basis) {
    f.validate();
    for (const ComponentFn* c : {&f.plus, &f.minus})
      if (!c->empty()) {
        klo = std::min(klo, c->lo());
        khi = std::max(khi, c->hi());
      }
  }
  std::vector<double> edges = bump_edges(basis);
  // <f_i, f_j> on a fixed fine edge-aligned grid
  Grid1D ip_grid = make_aligned_grid(klo, khi, edges, (khi - klo) / 48.0);
  std::vector<std::vector<cx>> G(n, std::vector<cx>(n, cx(0.0, 0.0)));
  for (std::size_t q = 0; q < ip_grid.size(); ++q) {
    double k = ip_grid.nodes[q], w = ip_grid.weights[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        G[i][j] -= w * (basis[i].plus(k) * basis[j].plus(k) + basis[i].minus(k) * basis[j].minus(k));
  }

  // r-panel width: coarse cap from the kernel period, fine only near the
  // pole zone around the origin
  double min_pole = K.rho();
  for (const auto& pd : K.w_poles) min_pole = std::min(min_pole, pd.location.imag());
  double hr = std::min(1.2, pi / K.rho() * 2.0);

  double shell_lo = 0.0, shell_hi = opts.extent0;
  int shells_done = 0;
  while (true) {
    // panels covering [shell_lo, shell_hi] and its mirror
    Grid1D half = make_graded_grid(shell_lo, shell_hi, {}, hr, std::min(min_pole, hr));
    std::size_t m = half.size();
    // image values F_i(+-r) for every node, in parallel
    std::vector<std::vector<cx>> F(2 * m, std::vector<cx>(n));
    parallel_for(m, [&](std::size_t qi) {
      for (int side = 0; side < 2; ++side) {
        double r = side == 0 ? half.nodes[qi] : -half.nodes[qi];
        Grid1D kg = make_aligned_grid(klo, khi, edges, 5.0 / std::max(std::abs(r), 8.0));
        std::vector<cx>& row = F[2 * qi + side];
        for (int i = 0; i < n; ++i) row[i] = 0.0;
        for (std::size_t kq = 0; kq < kg.size(); ++kq) {
          double k = kg.nodes[kq], wk = kg.weights[kq];
          cx psi_p = K.psi(r, k), psi_m = K.psi(-r, k);
          for (int i = 0; i < n; ++i) {
            double fp = basis[i].plus(k), fm = basis[i].minus(k);
            if (fp != 0.0 || fm != 0.0) row[i] += wk * (psi_p * fp - psi_m * fm);
          }
        }
        for (int i = 0; i < n; ++i) row[i] /= std::sqrt(2.0 * pi);
      }
    });
    std::vector<std::vector<cx>> shellG(n, std::vector<cx>(n, cx(0.0, 0.0)));
    for (std::size_t qi = 0; qi < m; ++qi) {
      double w = half.weights[qi];
      for (int side = 0; side < 2; ++side) {
        const std::vector<cx>& row = F[2 * qi + side];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) shellG[i][j] += w * std::conj(row[i]) * row[j];
      }
    }
    double shell_max = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        G[i][j] += shellG[i][j];
        if (shells_done > 0) shell_max = std::max(shell_max, std::abs(shellG[i][j]));
      }
    if (shells_done == 0) shell_max = std::numeric_limits<double>::infinity();
    ++shells_done;
    if (shells_done >= 2 && shell_max < 0.2 * opts.tol) break;
    shell_lo = shell_hi;
    shell_hi *= 2.0;
    if (shell_hi > opts.extent_max)
      throw NonConvergence("gram_defect_forward: image tail did not fall below tolerance");
  }

  DefectReport rep;
  rep.side = DefectReport::Side::forward;
  rep.gram_defect = std::move(G);
  rep.quad_tol = opts.tol;
  detail::finish_report(rep, opts);
  return rep;
}

// <T h_i, T h_j> - <h_i, h_j> with T = adjoint transform, on a position basis
inline DefectReport gram_defect_adjoint(const KernelSpec& K, const std::vector<PositionFn>& basis,
                                        const GramOptions& opts = {}) {
  const int n = static_cast<int>(basis.size());
  double rlo = 1e300, rhi = -1e300;
  for (const auto& h : basis) {
    rlo = std::min(rlo, h.f.lo());
    rhi = std::max(rhi, h.f.hi());
  }
  std::vector<double> edges = bump_edges(basis);
  Grid1D ip_grid = make_aligned_grid(rlo, rhi, edges, (rhi - rlo) / 48.0);
  std::vector<std::vector<cx>> G(n, std::vector<cx>(n, cx(0.0, 0.0)));
  for (std::size_t q = 0; q < ip_grid.size(); ++q) {
    double r = ip_grid.nodes[q], w = ip_grid.weights[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G[i][j] -= w * basis[i](r) * basis[j](r);
  }

  double min_pole = K.kappa();
  for (const auto& pd : K.what_poles) min_pole = std::min(min_pole, pd.location.imag());
  double hk = std::min(1.2, pi / K.kappa() * 2.0);

  double shell_lo = 1e-9, shell_hi = opts.extent0;
  int shells_done = 0;
  while (true) {
    Grid1D kgrid = make_graded_grid(shell_lo, shell_hi, {}, hk, std::min(min_pole, hk));
    std::size_t m = kgrid.size();
    std::vector<std::vector<cx>> F(2 * m, std::vector<cx>(n));  // delta = +, -
    parallel_for(m, [&](std::size_t qi) {
      double k = kgrid.nodes[qi];
      Grid1D rg = make_aligned_grid(rlo, rhi, edges, 5.0 / std::max(std::abs(k), 8.0));
      for (int d = 0; d < 2; ++d)
        for (int i = 0; i < n; ++i) F[2 * qi + d][i] = 0.0;
      for (std::size_t rq = 0; rq < rg.size(); ++rq) {
        double r = rg.nodes[rq], wr = rg.weights[rq];
        cx psi_p = K.psi(r, -k), psi_m = K.psi(-r, -k);
        for (int i = 0; i < n; ++i) {
          double hv = basis[i](r);
          if (hv != 0.0) {
            F[2 * qi + 0][i] += wr * psi_p * hv;
            F[2 * qi + 1][i] -= wr * psi_m * hv;
          }
        }
      }
      for (int d = 0; d < 2; ++d)
        for (int i = 0; i < n; ++i) F[2 * qi + d][i] /= std::sqrt(2.0 * pi);
    });
    std::vector<std::vector<cx>> shellG(n, std::vector<cx>(n, cx(0.0, 0.0)));
    for (std::size_t qi = 0; qi < m; ++qi) {
      double w = kgrid.weights[qi];
      for (int d = 0; d < 2; ++d) {
        const std::vector<cx>& row = F[2 * qi + d];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) shellG[i][j] += w * std::conj(row[i]) * row[j];
      }
    }
    double shell_max = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        G[i][j] += shellG[i][j];
        if (shells_done > 0) shell_max = std::max(shell_max, std::abs(shellG[i][j]));
      }
    if (shells_done == 0) shell_max = std::numeric_limits<double>::infinity();
    ++shells_done;
    if (shells_done >= 2 && shell_max < 0.2 * opts.tol) break;
    shell_lo = shell_hi;
    shell_hi *= 2.0;
    if (shell_hi > opts.extent_max)
      throw NonConvergence("gram_defect_adjoint: image tail did not fall below tolerance");
  }

  DefectReport rep;
  rep.side = DefectReport::Side::adjoint;
  rep.gram_defect = std::move(G);
  rep.quad_tol = opts.tol;
  detail::finish_report(rep, opts);
  return rep;
}

// ---------------------------------------------------------------------------
// closed-form defect predictions

struct PredictedDefect {
  DefectReport::Side side = DefectReport::Side::adjoint;
  int expected_rank = 0;
  std::vector<double> scales;  // defect operator = sum_t scales[t] chi_t (x) conj(chi_t)
  std::vector<std::function<cx(double)>> position_factors;            // adjoint side
  std::vector<std::function<std::array<cx, 2>(double)>> momentum_factors;  // forward side
};

namespace detail {

inline std::function<cx(double)> bound_state_factor(const KernelSpec& K) {
  auto w = K.w;
  double kap = K.kappa();
  return [w, kap](double r) { return 2.0 * std::cosh(kap * r) * std::sqrt(w(cx(r, 0.0))); };
}

}  // namespace detail

// Prediction for the psi_N kernel family across its parameter windows.
inline PredictedDefect predict_defect_psi_n(const KernelSpec& K,
                                            DefectReport::Side side) {
  if (K.name != "psi_n") throw InvalidParameter("predict_defect_psi_n: wrong kernel");
  const ScaleParams& p = K.params;
  double rk = p.rho_kappa();
  int N = K.N;
  double rho = p.rho, kap = p.kappa;
  PredictedDefect pd;
  pd.side = side;

  auto sinprod = [&](int j0, int j1) {
    double v = 1.0;
    for (int j = j0; j <= j1; ++j) v *= std::sin(j * pi * pi / rk);
    return v;
  };

  if (side == DefectReport::Side::forward) {
    if (rk > (N + 0.5) * pi) return pd;  // isometry window: zero defect
    if (N > 0 && rk > N * pi) {
      // one pole left the strip: rank-2 even/odd pair
      double scale = parity(N) * rho * sinprod(N + 1, 2 * N + 1) / (2.0 * pi * sinprod(1, N));
      auto chi = [rho, kap, rk, N](double k, bool even) -> std::array<cx, 2> {
        cx pref = std::sinh(rho * k);
        for (int j = 1; j <= N; ++j)
          pref /= 2.0 * std::sinh(cx(pi * k / kap, j * pi * pi / rk));
        cx arg{pi * k / (2.0 * kap), (N + 1) * pi * pi / (2.0 * rk)};
        cx val = even ? pref / std::cosh(arg) : pref / std::sinh(arg);
        return even ? std::array<cx, 2>{val, -val} : std::array<cx, 2>{val, val};
      };
      pd.expected_rank = 2;
      pd.scales = {scale, -scale};
      pd.momentum_factors.push_back([chi](double k) { return chi(k, true); });
      pd.momentum_factors.push_back([chi](double k) { return chi(k, false); });
      return pd;
    }
    if (N == 0) {
      // deeper N=0 windows: I_n^- or I_n^+, rank 2n
      int nn = static_cast<int>(std::floor(pi / (2.0 * rk)));
      double scale = rho * std::sin(pi * pi / rk) / (2.0 * pi);
      pd.expected_rank = 2 * nn;
      for (int j = 1; j <= nn; ++j) {
        auto chi = [rho, kap, rk, j](double k, bool even) -> std::array<cx, 2> {
          cx pref = std::sinh(j * rho * k);
          cx arg{pi * k / (2.0 * kap), pi * pi / (2.0 * rk)};
          cx val = even ? pref / std::cosh(arg) : pref / std::sinh(arg);
          return even ? std::array<cx, 2>{val, -val} : std::array<cx, 2>{val, val};
        };
        pd.scales.push_back(scale);
        pd.momentum_factors.push_back([chi](double k) { return chi(k, true); });
        pd.scales.push_back(-scale);
        pd.momentum_factors.push_back([chi](double k) { return chi(k, false); });
      }
      return pd;
    }
    throw IntervalMismatch("predict_defect_psi_n: forward prediction for N>0 covers only n=1");
  }

  // adjoint side
  if (rk >= (N + 1) * pi) return pd;  // unitary window
  if (rk > (N + 0.5) * pi) {
    // bound state window: rank 1, scale -1/(Psi_N, Psi_N)
    double ip = parity(N + 1) * pi * sinprod(1, N) / (kap * sinprod(N + 1, 2 * N + 1));
    pd.expected_rank = 1;
    pd.scales = {-1.0 / ip};
    pd.position_factors.push_back(detail::bound_state_factor(K));
    return pd;
  }
  if (N > 0 && rk > N * pi) {
    double scale = parity(N) * kap * sinprod(N + 1, 2 * N + 1) / (pi * sinprod(1, N));
    pd.expected_rank = 1;
    pd.scales = {scale};
    pd.position_factors.push_back(detail::bound_state_factor(K));
    return pd;
  }
  if (N == 0) {
    // I_m windows: rank m with alternating signs; factors from the s_m
    // recurrence (2cosh((j+1)kr) for even j, 2sinh((j+1)kr) for odd j)
    int m = static_cast<int>(std::floor(pi / rk));
    double scale = kap * std::sin(pi * pi / rk) / pi;
    pd.expected_rank = m;
    auto w = K.w;
    for (int j = 0; j < m; ++j) {
      pd.scales.push_back(scale * parity(j));
      int mode = j + 1;
      bool even = (j % 2 == 0);
      pd.position_factors.push_back([w, kap, mode, even](double r) -> cx {
        double g = even ? 2.0 * std::cosh(mode * kap * r) : 2.0 * std::sinh(mode * kap * r);
        return g * std::sqrt(w(cx(r, 0.0)));
      });
    }
    return pd;
  }
  throw IntervalMismatch("predict_defect_psi_n: adjoint prediction for N>0 covers only n=1");
}

// Predictions for the example kernels of Props B.3-B.5.
inline PredictedDefect predict_defect_example(const KernelSpec& K) {
  const ScaleParams& p = K.params;
  double rk = p.rho_kappa();
  PredictedDefect pd;
  pd.side = DefectReport::Side::adjoint;
  auto w = K.w;
  if (K.name == "reflectionless_a") {
    if (!(rk > 2.0 * pi)) throw IntervalMismatch("F_a prediction needs rho*kappa > 2 pi");
    double ip = pi / (p.kappa * std::sin(2.0 * pi * pi / rk));
    pd.expected_rank = 1;
    pd.scales = {-1.0 / ip};
    pd.position_factors.push_back([w](double r) -> cx { return std::sqrt(w(cx(r, 0.0))); });
    return pd;
  }
  if (K.name != "example_phi") throw InvalidParameter("predict_defect_example: wrong kernel");
  double ph0 = phi_zero(p), phe = phi_even(p);
  if (std::abs(K.phi - std::fmod(ph0, pi)) < 1e-12 && K.sigma > 0) {
    if (rk >= pi) return pd;  // unitary
    if (rk > 0.5 * pi) {
      double ip = -pi / (p.kappa * std::sin(pi * pi / rk));
      pd.expected_rank = 1;
      pd.scales = {-1.0 / ip};
      double kap = p.kappa;
      pd.position_factors.push_back([w, kap](double r) -> cx {
        return 2.0 * std::cosh(kap * r) * std::sqrt(w(cx(r, 0.0)));
      });
      return pd;
    }
    throw IntervalMismatch("F_+(phi_0): below pi/2 use the psi_n (N=0) prediction");
  }
  if (std::abs(K.phi - phe) < 1e-12) {
    if (K.sigma < 0) return pd;  // F_-(phi_e) unitary
    double ip = pi / (2.0 * p.kappa * std::sin(pi * pi / rk));
    pd.expected_rank = 1;
    pd.scales = {-1.0 / ip};
    pd.position_factors.push_back([w](double r) -> cx { return std::sqrt(w(cx(r, 0.0))); });
    return pd;
  }
  throw InvalidParameter("predict_defect_example: phi matches neither phi_0 nor phi_e");
}

// Builds the predicted Gram-defect matrix of a prediction on a basis.
inline std::vector<std::vector<cx>> predicted_gram(const PredictedDefect& pd,
                                                   const std::vector<TwoComponentFn>& mom_basis,
                                                   const std::vector<PositionFn>& pos_basis,
                                                   double tol = 1e-10) {
  std::size_t n = pd.side == DefectReport::Side::forward ? mom_basis.size() : pos_basis.size();
  std::vector<std::vector<cx>> M(n, std::vector<cx>(n, cx(0.0, 0.0)));
  std::size_t nf = pd.scales.size();
  std::vector<std::vector<cx>> overlap(nf, std::vector<cx>(n));  // <f_i, chi_t>
  for (std::size_t t = 0; t < nf; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pd.side == DefectReport::Side::forward) {
        const TwoComponentFn& f = mom_basis[i];
        double lo = std::min(f.plus.empty() ? 1e300 : f.plus.lo(),
                             f.minus.empty() ? 1e300 : f.minus.lo());
        double hi = std::max(f.plus.empty() ? -1e300 : f.plus.hi(),
                             f.minus.empty() ? -1e300 : f.minus.hi());
        auto g = [&](double k) {
          auto c = pd.momentum_factors[t](k);
          return f.plus(k) * c[0] + f.minus(k) * c[1];
        };
        overlap[t][i] = integrate_gl_adaptive(g, lo, hi, tol, 8).value;
      } else {
        const PositionFn& h = pos_basis[i];
        auto g = [&](double r) { return h(r) * pd.position_factors[t](r); };
        overlap[t][i] = integrate_gl_adaptive(g, h.f.lo(), h.f.hi(), tol, 8).value;
      }
    }
  }
  // D_ij = <f_i, (sum_t s_t chi_t (x) conj chi_t) f_j> = sum_t s_t <f_i,chi_t> conj <f_j,chi_t>
  for (std::size_t t = 0; t < nf; ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        M[i][j] += pd.scales[t] * overlap[t][i] * std::conj(overlap[t][j]);
  return M;
}

}  // namespace relcm
