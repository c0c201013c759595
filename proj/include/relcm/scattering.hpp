#pragma once

#include "relcm/transforms.hpp"

namespace relcm {

struct DynamicsSpec {
  enum class Kind { multiplier_mu, multiplier_d };
  Kind kind = Kind::multiplier_mu;
  std::function<double(double)> fn;   // mu(k) even, mu' > 0 on (0,inf); d(r) odd, d' > 0
  std::function<double(double)> dfn;  // derivative, used for grid sizing
};

inline DynamicsSpec make_mu_cm(const KernelSpec& K) {
  double rho = K.rho();
  return {DynamicsSpec::Kind::multiplier_mu,
          [rho](double k) { return 2.0 * std::cosh(rho * k); },
          [rho](double k) { return 2.0 * rho * std::sinh(rho * k); }};
}
inline DynamicsSpec make_d_cm(const KernelSpec& K) {
  double kap = K.kappa();
  return {DynamicsSpec::Kind::multiplier_d,
          [kap](double r) { return 2.0 * std::sinh(kap * r); },
          [kap](double r) { return 2.0 * kap * std::cosh(kap * r); }};
}

// A state sampled in the representation that diagonalizes its dynamics:
// momentum-side two-component samples for mu-type generators, position-side
// samples for d-type generators. Evolution is an exact phase multiplication.
struct State {
  enum class Rep { momentum, position };
  Rep rep = Rep::momentum;
  Grid1D grid;
  std::vector<cx> plus, minus;  // position states use `plus` only
};

inline State make_momentum_state(const TwoComponentFn& f, int panels = 48) {
  f.validate();
  double lo = std::min(f.plus.empty() ? 1e300 : f.plus.lo(), f.minus.empty() ? 1e300 : f.minus.lo());
  double hi = std::max(f.plus.empty() ? -1e300 : f.plus.hi(), f.minus.empty() ? -1e300 : f.minus.hi());
  State s;
  s.rep = State::Rep::momentum;
  s.grid = make_aligned_grid(lo, hi, bump_edges(std::vector<TwoComponentFn>{f}), (hi - lo) / panels);
  s.plus.resize(s.grid.size());
  s.minus.resize(s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    s.plus[i] = f.plus(s.grid.nodes[i]);
    s.minus[i] = f.minus(s.grid.nodes[i]);
  }
  return s;
}

inline State make_position_state(const PositionFn& h, int panels = 48) {
  State s;
  s.rep = State::Rep::position;
  s.grid = make_aligned_grid(h.f.lo(), h.f.hi(), bump_edges(std::vector<PositionFn>{h}),
                             (h.f.hi() - h.f.lo()) / panels);
  s.plus.resize(s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) s.plus[i] = h(s.grid.nodes[i]);
  return s;
}

inline double state_norm(const State& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    acc += s.grid.weights[i] * std::norm(s.plus[i]);
    if (s.rep == State::Rep::momentum) acc += s.grid.weights[i] * std::norm(s.minus[i]);
  }
  return std::sqrt(acc);
}

inline State evolve(const KernelSpec& K, const DynamicsSpec& dyn, const State& s, double t) {
  if (!K.unitary_window())
    throw NonUnitaryKernel("evolve: kernel defect is nonzero on this parameter window");
  bool want_mom = dyn.kind == DynamicsSpec::Kind::multiplier_mu;
  if ((s.rep == State::Rep::momentum) != want_mom)
    throw InvalidParameter("evolve: state representation does not diagonalize this dynamics");
  State out = s;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    cx ph = std::exp(-iu * t * dyn.fn(s.grid.nodes[i]));
    out.plus[i] = ph * s.plus[i];
    if (s.rep == State::Rep::momentum) out.minus[i] = ph * s.minus[i];
  }
  return out;
}

// position render of a momentum state: (F f)(r)
inline cx position_render(const KernelSpec& K, const State& s, double r) {
  if (s.rep != State::Rep::momentum) throw InvalidParameter("position_render: momentum state required");
  cx acc = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    double k = s.grid.nodes[i];
    acc += s.grid.weights[i] * (K.psi(r, k) * s.plus[i] - K.psi(-r, k) * s.minus[i]);
  }
  return acc / std::sqrt(2.0 * pi);
}

// || F (e^{-i t mu} f) ||_1 by position-space quadrature (equals ||f|| when
// the transform is isometric)
inline double evolved_position_norm(const KernelSpec& K, const TwoComponentFn& f, double t,
                                    const DynamicsSpec& dyn, double r_margin = 320.0) {
  State s = evolve(K, dyn, make_momentum_state(f), t);
  double khi = s.grid.nodes.back();
  double R = std::abs(t) * dyn.dfn(khi) + r_margin;
  double hr = std::min(0.8, 1.5 / (khi + 1.0));
  Grid1D rg = make_gl_grid(-R, R, std::max(8, static_cast<int>(std::ceil(2.0 * R / hr))));
  std::vector<double> cell(rg.size());
  parallel_for(rg.size(), [&](std::size_t i) {
    cell[i] = rg.weights[i] * std::norm(position_render(K, s, rg.nodes[i]));
  });
  double acc = 0.0;
  for (double v : cell) acc += v;
  return std::sqrt(acc);
}

// || (U(-t) U_0(t) - W_-) F_0 f ||_1 for the mu-type dynamics. Equals
// || (F_0 - F) e^{-i t mu} f ||_1, integrated directly: the difference decays
// fast on both sides, so truncation is benign even at small |t|.
inline double wave_operator_defect(const KernelSpec& K, const DynamicsSpec& dyn,
                                   const TwoComponentFn& f, double t, double r_margin = 80.0) {
  if (dyn.kind != DynamicsSpec::Kind::multiplier_mu)
    throw InvalidParameter("wave_operator_defect: mu-type dynamics required");
  if (!K.unitary_window())
    throw NonUnitaryKernel("wave_operator_defect: kernel is not unitary on this window");
  f.validate();
  double klo = std::min(f.plus.empty() ? 1e300 : f.plus.lo(), f.minus.empty() ? 1e300 : f.minus.lo());
  double khi = std::max(f.plus.empty() ? -1e300 : f.plus.hi(), f.minus.empty() ? -1e300 : f.minus.hi());
  double phase_span = std::abs(t) * (dyn.fn(khi) - dyn.fn(klo));
  double wcap = (khi - klo) / std::max(16.0, phase_span / 3.0 + (khi - klo) * 4.0);
  Grid1D kg = make_aligned_grid(klo, khi, bump_edges(std::vector<TwoComponentFn>{f}), wcap);
  std::size_t nk = kg.size();
  std::vector<cx> gp(nk), gm(nk);
  for (std::size_t i = 0; i < nk; ++i) {
    double k = kg.nodes[i];
    cx ph = std::exp(-iu * t * dyn.fn(k));
    gp[i] = ph * f.plus(k);
    gm[i] = ph * f.minus(k);
  }

  double R = std::abs(t) * dyn.dfn(khi) + r_margin;
  double hr = std::min(0.8, 1.5 / (khi + 1.0));
  Grid1D rg = make_gl_grid(-R, R, std::max(8, static_cast<int>(std::ceil(2.0 * R / hr))));
  std::size_t nr = rg.size();
  std::vector<double> cell(nr);
  parallel_for(nr, [&](std::size_t ri) {
    double r = rg.nodes[ri];
    cx diff = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
      double k = kg.nodes[i], w = kg.weights[i];
      cx ep = std::exp(iu * r * k);
      diff += w * ((ep - K.psi(r, k)) * gp[i] - (1.0 / ep - K.psi(-r, k)) * gm[i]);
    }
    cell[ri] = rg.weights[ri] * std::norm(diff / std::sqrt(2.0 * pi));
  });
  double d2 = 0.0;
  for (std::size_t ri = 0; ri < nr; ++ri) d2 += cell[ri];
  return std::sqrt(d2);
}

// || (U^(-t) U^_0(t) - W^_-) F_0^* h ||_2 for the d-type dual dynamics, via
//   defect^2 = ||g_t||^2 + ||h||^2 - 2 Re <F g_t, e^{-i t d} U^{1/2} h>,
//   g_t = F_0^* (e^{-i t d} h).
inline double wave_operator_defect_dual(const KernelSpec& K, const DynamicsSpec& dyn,
                                        const PositionFn& h, double t) {
  if (dyn.kind != DynamicsSpec::Kind::multiplier_d)
    throw InvalidParameter("wave_operator_defect_dual: d-type dynamics required");
  if (!K.unitary_window())
    throw NonUnitaryKernel("wave_operator_defect_dual: kernel is not unitary on this window");
  double rlo = h.f.lo(), rhi = h.f.hi();
  double dmax = std::max(std::abs(dyn.dfn(rlo)), std::abs(dyn.dfn(rhi)));
  double Khi = std::abs(t) * dmax + 30.0;
  double hk = std::min(1.2, 5.0 / std::max({std::abs(rlo), std::abs(rhi), 1.0}));
  Grid1D kg = make_gl_grid(0.0, Khi, std::max(8, static_cast<int>(std::ceil(Khi / hk))));
  double rate = std::abs(t) * dmax + Khi;
  double hrr = std::min(5.0 / rate, (rhi - rlo) / 8.0);
  Grid1D rg = make_aligned_grid(rlo, rhi, bump_edges(std::vector<PositionFn>{h}), hrr);
  std::size_t nk = kg.size(), nr = rg.size();

  std::vector<cx> hv(nr);  // e^{-i t d(r)} h(r)
  for (std::size_t ri = 0; ri < nr; ++ri) {
    double r = rg.nodes[ri];
    hv[ri] = std::exp(-iu * t * dyn.fn(r)) * h(r);
  }
  // g_delta(k) = (delta/sqrt(2 pi)) int dr e^{-i delta r k} hv(r)
  std::vector<cx> gp(nk), gm(nk);
  parallel_for(nk, [&](std::size_t ki) {
    double k = kg.nodes[ki];
    cx ap = 0.0, am = 0.0;
    for (std::size_t ri = 0; ri < nr; ++ri) {
      double r = rg.nodes[ri];
      cx em = std::exp(-iu * r * k);
      ap += rg.weights[ri] * em * hv[ri];
      am += rg.weights[ri] * hv[ri] / em;
    }
    gp[ki] = ap / std::sqrt(2.0 * pi);
    gm[ki] = -am / std::sqrt(2.0 * pi);
  });
  double norm_g2 = 0.0;
  for (std::size_t ki = 0; ki < nk; ++ki)
    norm_g2 += kg.weights[ki] * (std::norm(gp[ki]) + std::norm(gm[ki]));

  // defect^2 = int_supp |F e^{itd} - U^{1/2} h|^2 + (||g||^2 - int_supp |F|^2):
  // the second bracket is the mass F = F g_t leaks outside supp h, where the
  // phases e^{itd(r)} are unresolvable but the norm identity ||F g|| = ||g||
  // (unitary window) still accounts for it.
  std::vector<double> cell_diff(nr), cell_mass(nr);
  parallel_for(nr, [&](std::size_t ri) {
    double r = rg.nodes[ri];
    cx F = 0.0;
    for (std::size_t ki = 0; ki < nk; ++ki) {
      double k = kg.nodes[ki];
      F += kg.weights[ki] * (K.psi(r, k) * gp[ki] - K.psi(-r, k) * gm[ki]);
    }
    F /= std::sqrt(2.0 * pi);
    cx phase = std::exp(iu * t * dyn.fn(r));
    cell_diff[ri] = rg.weights[ri] * std::norm(phase * F - K.u_sqrt(cx(r, 0.0)) * h(r));
    cell_mass[ri] = rg.weights[ri] * std::norm(F);
  });
  double term1 = 0.0, mass_in = 0.0;
  for (std::size_t ri = 0; ri < nr; ++ri) {
    term1 += cell_diff[ri];
    mass_in += cell_mass[ri];
  }
  double d2 = term1 + std::max(0.0, norm_g2 - mass_in);
  return std::sqrt(d2);
}

struct DefectLadderPoint {
  double t;
  double defect;
};

inline std::vector<DefectLadderPoint> defect_ladder(const KernelSpec& K, const DynamicsSpec& dyn,
                                                    const TwoComponentFn& f, const PositionFn& h,
                                                    const std::vector<double>& ts) {
  std::vector<DefectLadderPoint> out;
  for (double t : ts) {
    double d = dyn.kind == DynamicsSpec::Kind::multiplier_mu
                   ? wave_operator_defect(K, dyn, f, t)
                   : wave_operator_defect_dual(K, dyn, h, t);
    out.push_back({t, d});
  }
  return out;
}

// ---------------------------------------------------------------------------
// parity / time reversal / S-matrix checks

struct SymmetryReport {
  double time_reversal_max = 0.0;  // Psi(r,k) - T(k)Psi(-r,-k) + R(k)Psi(r,-k)
  double in_out_max = 0.0;         // Psi^in = S(k) Psi^out residual
  double s_unitarity_max = 0.0;    // S(k) S(k)^* = 1
  double parity_max = 0.0;         // F* P F = antidiagonal(-1,-1)
};

inline SymmetryReport symmetry_checks(const KernelSpec& K, int samples = 40,
                                      bool with_parity = true) {
  SymmetryReport rep;
  Rng rng(0x712fULL);
  for (int s = 0; s < samples; ++s) {
    double r = rng.uniform(-3.0, 3.0), k = rng.uniform(0.05, 2.5);
    cx T = K.T(cx(k, 0.0)), R = K.R(cx(k, 0.0));
    cx tr = K.psi(r, k) - T * K.psi(-r, -k) + R * K.psi(r, -k);
    rep.time_reversal_max = std::max(rep.time_reversal_max, std::abs(tr));
    cx Tm = K.T(cx(-k, 0.0)), Rm = K.R(cx(-k, 0.0));
    cx Phi_p = Tm * K.psi(r, k) - Rm * K.psi(-r, k);
    cx Phi_m = Tm * K.psi(-r, k) - Rm * K.psi(r, k);
    cx res1 = K.psi(r, k) - (T * Phi_p + R * (-Phi_m));
    cx res2 = -K.psi(-r, k) - (R * Phi_p + T * (-Phi_m));
    rep.in_out_max = std::max({rep.in_out_max, std::abs(res1), std::abs(res2)});
    rep.s_unitarity_max =
        std::max({rep.s_unitarity_max, std::abs(std::norm(T) + std::norm(R) - 1.0),
                  std::abs(T * std::conj(R) + R * std::conj(T))});
  }
  if (with_parity) {
    // g = F* P F f versus (-f_-, -f_+) for one test state
    TwoComponentFn f;
    f.plus.bumps.push_back(Bump{1.1, 0.5, 1.0});
    f.minus.bumps.push_back(Bump{1.6, 0.45, 0.8});
    State st = make_momentum_state(f, 32);
    double R = 60.0;
    Grid1D rg = make_gl_grid(-R, R, static_cast<int>(2.0 * R / 0.5));
    std::vector<cx> Fm(rg.size());
    parallel_for(rg.size(), [&](std::size_t i) {
      Fm[i] = position_render(K, st, -rg.nodes[i]);  // (P F f)(r) = (F f)(-r)
    });
    for (double k : {0.9, 1.3, 1.7}) {
      cx gp = 0.0, gm = 0.0;
      for (std::size_t i = 0; i < rg.size(); ++i) {
        double r = rg.nodes[i];
        gp += rg.weights[i] * K.psi(r, -k) * Fm[i];
        gm -= rg.weights[i] * K.psi(-r, -k) * Fm[i];
      }
      gp /= std::sqrt(2.0 * pi);
      gm /= std::sqrt(2.0 * pi);
      rep.parity_max = std::max({rep.parity_max, std::abs(gp - (-f.minus(k))),
                                 std::abs(gm - (-f.plus(k)))});
    }
  }
  return rep;
}

}  // namespace relcm
