#pragma once

#include <memory>
#include <string>

#include "relcm/quadrature.hpp"
#include "relcm/special_n.hpp"

namespace relcm {

struct PoleDatum {
  cx location;  // representative, Im in (0, period/2]
  cx residue;
};

// Transform kernel Psi(r,k) = w(r)^{1/2} sum_tau m^tau(r,k) e^{i tau r k},
// m^tau = v(k) ell^tau(r,k), with the pole lists, amplitudes and asymptotic
// data needed by the residue sums and the scattering layer.
struct KernelSpec {
  std::string name;
  ScaleParams params;
  int N = -1;        // psi_n kernels
  double phi = 0.0;  // example kernels
  int sigma = +1;

  int ell_parity = +1;  // m^pm(r + i rho, k) = ell_parity m^pm(r, k)
  int v_parity = +1;    // v(k + i kappa) = v_parity v(k)
  bool double_pole = false;
  bool plane_wave_degenerate = false;

  std::vector<PoleDatum> w_poles;     // L representatives in Im r in (0, rho/2]
  std::vector<PoleDatum> what_poles;  // Lhat representatives in Im k in (0, kappa/2]

  std::function<cx(cx)> w, v, C, U, T, R;
  std::function<cx(int, cx, cx)> ell_fn;

  double rho() const { return params.rho; }
  double kappa() const { return params.kappa; }

  cx m(int tau, cx r, cx k) const { return v(k) * ell_fn(tau, r, k); }
  cx mu(int tau, cx r, cx k) const {
    double tv = tau > 0 ? 1.0 : -1.0;
    return std::exp(iu * tv * r * k) * m(tau, r, k);
  }
  cx lam(int tau, cx r, cx k) const {
    double tv = tau > 0 ? 1.0 : -1.0;
    return std::exp(iu * tv * r * k) * ell_fn(tau, r, k);
  }
  cx what(cx k) const { return v(k) * v(-k); }
  cx w_sqrt(double r) const { return std::sqrt(w(cx(r, 0.0))); }
  cx psi(double r, double k) const {
    cx rr{r, 0.0}, kk{k, 0.0};
    return w_sqrt(r) * (m(+1, rr, kk) * std::exp(iu * rr * kk) +
                        m(-1, rr, kk) * std::exp(-iu * rr * kk));
  }
  cx u_sqrt(cx r) const { return C(r) * std::sqrt(w(r)); }  // U(r)^{1/2}

  enum class Window { breakdown_deep, breakdown_n1, bound, unitary, endpoint, always };
  Window window() const {
    if (name != "psi_n") {
      if (name == "fourier") return Window::always;
      if (name == "reflectionless_a")
        return params.rho_kappa() > 2.0 * pi ? Window::unitary : Window::breakdown_deep;
      // example kernels: classified by the callers
      return Window::always;
    }
    double rk = params.rho_kappa();
    double lo = (N + 0.5) * pi, hi = (N + 1) * pi;
    if (std::abs(rk - hi) < 1e-12) return Window::endpoint;
    if (rk > hi) return Window::unitary;
    if (rk > lo) return Window::bound;
    if (rk > N * pi) return Window::breakdown_n1;
    return Window::breakdown_deep;
  }
  bool unitary_window() const {
    Window W = window();
    return W == Window::unitary || W == Window::endpoint || W == Window::always;
  }
};

namespace detail {

// reduce raw pole ordinates into (0, period), pair v <-> period - v, pick the
// representative with the smaller ordinate, and measure residues numerically
inline void build_pole_list(const std::function<cx(cx)>& fn, const std::vector<double>& raw,
                            double period, std::vector<PoleDatum>& out, bool& double_flag) {
  std::vector<double> reps;
  for (double v : raw) {
    double m = std::fmod(v, period);
    if (m <= 1e-12 * period) m += period;
    if (m >= period * (1.0 - 1e-12)) m -= period;
    double rep = std::min(m, period - m);
    if (std::abs(m - 0.5 * period) < 1e-3 * period) double_flag = true;  // self-paired
    bool dup = false;
    for (double r0 : reps) {
      if (std::abs(r0 - rep) < 1e-12 * period) dup = true;
      else if (std::abs(r0 - rep) < 1e-3 * period) double_flag = true;  // collision
    }
    if (!dup) reps.push_back(rep);
  }
  for (double rep : reps) {
    double gap = std::min(rep, 0.5 * period - rep) * 2.0;
    for (double other : reps)
      if (std::abs(other - rep) > 1e-12) gap = std::min(gap, std::abs(other - rep));
    if (gap < 1e-6) {  // too close to another pole to isolate
      double_flag = true;
      continue;
    }
    double radius = 0.35 * gap;
    cx loc{0.0, rep};
    cx res = residue_numeric(fn, loc, ContourSpec{loc, radius, 128});
    out.push_back({loc, res});
  }
}

inline void validate_kernel(const KernelSpec& K, int samples = 6) {
  Rng rng(0x5eedULL);
  for (int s = 0; s < samples; ++s) {
    double r = rng.uniform(-2.0, 2.0), k = rng.uniform(0.2, 2.0);
    double rp = rng.uniform(-2.0, 2.0);
    // conjugation conj Psi(r,k) = Psi(r,-k)
    if (std::abs(std::conj(K.psi(r, k)) - K.psi(r, -k)) > 1e-9 * (1.0 + std::abs(K.psi(r, k))))
      throw KernelInvariantViolation(K.name + ": Psi conjugation failed");
    // S-matrix unitarity
    cx T = K.T(cx(k, 0)), R = K.R(cx(k, 0));
    if (std::abs(std::norm(T) + std::norm(R) - 1.0) > 1e-10 ||
        std::abs(T * std::conj(R) + R * std::conj(T)) > 1e-10)
      throw KernelInvariantViolation(K.name + ": T/R unitarity failed");
    // |U| = 1 on the real line
    if (std::abs(std::abs(K.U(cx(r, 0))) - 1.0) > 1e-9)
      throw KernelInvariantViolation(K.name + ": |U(r)| != 1");
    // evenness assumption of the residue analysis
    for (int tau : {+1, -1})
      for (int taup : {+1, -1}) {
        auto L = [&](double kk, double r1, double r2) {
          return K.ell_fn(tau, r1, kk) * K.ell_fn(taup, r2, -kk) +
                 K.ell_fn(-tau, -r1, kk) * K.ell_fn(-taup, -r2, -kk);
        };
        cx lhs = L(k, r, rp), rhs = L(-k, -r, -rp);
        if (std::abs(lhs - rhs) > 1e-8 * (1.0 + std::abs(lhs)))
          throw KernelInvariantViolation(K.name + ": evenness assumption failed");
      }
  }
  // pole pairing: residue at i*period - r_j must be -w_j
  auto check_pairs = [&](const std::vector<PoleDatum>& poles, const std::function<cx(cx)>& fn,
                         double period) {
    for (const auto& pd : poles) {
      cx partner = iu * period - pd.location;
      double radius = std::max(1e-7, 0.3 * std::min(pd.location.imag(),
                                                    0.5 * period - pd.location.imag() + 1e-9));
      if (radius < 1e-6) continue;  // too close to a double pole to probe
      cx res = residue_numeric(fn, partner, ContourSpec{partner, radius, 128});
      if (std::abs(res + pd.residue) > 1e-7 * (1.0 + std::abs(pd.residue)))
        throw KernelInvariantViolation(K.name + ": pole pairing/residue antisymmetry failed");
    }
  };
  if (!K.double_pole) {
    auto vfn = K.v;
    check_pairs(K.w_poles, K.w, K.rho());
    check_pairs(K.what_poles, [vfn](cx k) { return vfn(k) * vfn(-k); }, K.kappa());
  }
}

}  // namespace detail

inline KernelSpec make_kernel_fourier(ScaleParams p) {
  KernelSpec K;
  K.name = "fourier";
  K.params = p;
  K.w = [](cx) { return cx(1.0, 0.0); };
  K.v = [](cx) { return cx(1.0, 0.0); };
  K.ell_fn = [](int tau, cx, cx) { return tau > 0 ? cx(1.0, 0.0) : cx(0.0, 0.0); };
  K.T = [](cx) { return cx(1.0, 0.0); };
  K.R = [](cx) { return cx(0.0, 0.0); };
  K.C = [](cx) { return cx(1.0, 0.0); };
  K.U = [](cx) { return cx(1.0, 0.0); };
  return K;
}

// Kernel from psi_N under x = a_- r/rho, y = a_- k/kappa (Thm 4.1 family).
inline KernelSpec make_kernel_psi_n(ScaleParams p, int N) {
  // plane-wave degenerations: psi_0 at a_+ = l a_- is (-1)^{l-1} e^{irk};
  // the raw formula is 0/0 there and its pointwise square root loses the sign
  double lr = p.a_plus / p.a_minus;
  if (N == 0 && std::abs(lr - std::round(lr)) < 1e-9 && std::round(lr) >= 1.0) {
    long l = std::lround(lr);
    double sg = parity(l - 1);
    KernelSpec K = make_kernel_fourier(p);
    K.name = "psi_n";
    K.N = 0;
    K.plane_wave_degenerate = true;
    K.ell_fn = [sg](int tau, cx, cx) { return tau > 0 ? cx(sg, 0.0) : cx(0.0, 0.0); };
    K.T = [sg](cx) { return cx(sg, 0.0); };
    K.C = [sg](cx) { return cx(sg, 0.0); };
    return K;
  }
  auto sn = std::make_shared<SpecialNEvaluator>(p, N);
  KernelSpec K;
  K.name = "psi_n";
  K.params = p;
  K.N = N;
  K.ell_parity = (N % 2 == 0) ? -1 : +1;  // (-1)^{N+1}
  K.v_parity = K.ell_parity;
  K.w = [sn, p](cx r) { return sn->w_n(p.x_of_r(r)); };
  K.v = [sn, p](cx k) { return sn->v_n(p.y_of_k(k)); };
  K.ell_fn = [sn, p](int tau, cx r, cx k) { return sn->ell(tau, p.x_of_r(r), p.y_of_k(k)); };
  K.T = [sn, p](cx k) { return sn->amplitudes_n(p.y_of_k(k)).t; };
  K.R = [sn, p](cx k) { return sn->amplitudes_n(p.y_of_k(k)).r; };
  K.C = [sn, p](cx r) { return sn->c_n(p.x_of_r(r)); };
  K.U = [sn, p](cx r) { return sn->u_big(p.x_of_r(r)); };
  std::vector<double> raw_w, raw_what;
  for (int j = 0; j <= N; ++j) raw_w.push_back((j + 0.5) * pi / p.kappa);
  for (int j = 1; j <= N + 1; ++j) raw_what.push_back(j * pi / p.rho);
  auto vfn = K.v;
  detail::build_pole_list(K.w, raw_w, p.rho, K.w_poles, K.double_pole);
  detail::build_pole_list([vfn](cx k) { return vfn(k) * vfn(-k); }, raw_what, p.kappa,
                          K.what_poles, K.double_pole);
  detail::validate_kernel(K);
  return K;
}

// The two-parameter example family F_sigma(phi); phi is reduced mod pi into
// (0, pi]. phi = pi/2 and pi give plane-wave kernels, phi = pi/4 and 3pi/4
// give a double pole of the dual weight.
inline KernelSpec make_kernel_example(ScaleParams p, int sigma, double phi) {
  double ph = std::fmod(phi, pi);
  if (ph <= 0.0) ph += pi;
  KernelSpec K;
  K.name = "example_phi";
  K.params = p;
  K.sigma = sigma;
  K.phi = ph;
  K.ell_parity = -1;
  K.v_parity = -1;
  double rho = p.rho, kappa = p.kappa;
  double sg = sigma > 0 ? 1.0 : -1.0;
  cx s2 = std::sinh(2.0 * iu * ph);
  K.w = [rho, ph](cx r) {
    return 1.0 / (4.0 * std::sinh(pi * r / rho + iu * ph) * std::sinh(pi * r / rho - iu * ph));
  };
  K.v = [kappa, ph](cx k) { return 1.0 / (2.0 * iu * std::sinh(pi * k / kappa - 2.0 * iu * ph)); };
  K.ell_fn = [rho, kappa, ph, sg, s2](int tau, cx r, cx k) -> cx {
    if (tau < 0) return 2.0 * iu * sg * s2 * std::exp(-pi * r / rho);
    return 2.0 * iu * (std::exp(-pi * r / rho) * std::sinh(pi * k / kappa - 2.0 * iu * ph) -
                       std::exp(pi * r / rho) * std::sinh(pi * k / kappa));
  };
  K.T = [kappa, ph](cx k) {
    return std::sinh(pi * k / kappa) / std::sinh(2.0 * iu * ph - pi * k / kappa);
  };
  K.R = [kappa, ph, sg, s2](cx k) { return sg * s2 / std::sinh(2.0 * iu * ph - pi * k / kappa); };
  K.C = [rho, ph](cx r) { return -2.0 * std::exp(iu * ph) * std::sinh(pi * r / rho + iu * ph); };
  K.U = [rho, ph](cx r) {
    return std::exp(2.0 * iu * ph) * std::sinh(pi * r / rho + iu * ph) /
           std::sinh(pi * r / rho - iu * ph);
  };
  K.plane_wave_degenerate =
      std::abs(ph - 0.5 * pi) < 1e-10 || std::abs(ph - pi) < 1e-10;
  if (!K.plane_wave_degenerate) {
    auto vfn = K.v;
    detail::build_pole_list(K.w, {rho * ph / pi}, rho, K.w_poles, K.double_pole);
    detail::build_pole_list([vfn](cx k) { return vfn(k) * vfn(-k); }, {2.0 * kappa * ph / pi},
                            kappa, K.what_poles, K.double_pole);
    detail::validate_kernel(K);
  }
  return K;
}

inline double phi_zero(const ScaleParams& p) { return pi * pi / (2.0 * p.rho_kappa()); }
inline double phi_even(const ScaleParams& p) { return pi * pi / (2.0 * p.rho_kappa()) + 0.5 * pi; }

inline KernelSpec make_kernel_phi0(ScaleParams p) { return make_kernel_example(p, +1, phi_zero(p)); }
inline KernelSpec make_kernel_phie(ScaleParams p, int sigma) {
  if (!(p.rho_kappa() > pi)) throw IntervalMismatch("F_sigma(phi_e) needs rho*kappa > pi");
  return make_kernel_example(p, sigma, phi_even(p));
}

// Reflectionless kernel F_a (m^- = 0); isometric for rho*kappa > 2 pi.
inline KernelSpec make_kernel_reflectionless(ScaleParams p) {
  KernelSpec K;
  K.name = "reflectionless_a";
  K.params = p;
  K.ell_parity = -1;
  K.v_parity = -1;
  double rho = p.rho, kappa = p.kappa;
  K.w = [rho, kappa](cx r) {
    return 1.0 / (4.0 * std::cosh(pi / rho * (r + iu * (pi / kappa))) *
                  std::cosh(pi / rho * (r - iu * (pi / kappa))));
  };
  K.v = [rho, kappa](cx k) {
    return 1.0 / (2.0 * iu * std::sinh(pi / kappa * (k - iu * (pi / rho))));
  };
  K.ell_fn = [rho, kappa](int tau, cx r, cx k) -> cx {
    if (tau < 0) return 0.0;
    return 2.0 * iu * (std::exp(pi * r / rho) * std::sinh(pi / kappa * (k + iu * (pi / rho))) +
                       std::exp(-pi * r / rho) * std::sinh(pi / kappa * (k - iu * (pi / rho))));
  };
  K.T = [rho, kappa](cx k) {
    return std::sinh(pi / kappa * (k + iu * (pi / rho))) /
           std::sinh(pi / kappa * (k - iu * (pi / rho)));
  };
  K.R = [](cx) { return cx(0.0, 0.0); };
  K.C = [rho, kappa](cx r) {
    double c = pi * pi / (rho * kappa);
    return 2.0 * std::exp(iu * c) * std::cosh(pi * r / rho + iu * c);
  };
  K.U = [rho, kappa](cx r) {  // C^2 w in closed form
    double c = pi * pi / (rho * kappa);
    return std::exp(2.0 * iu * c) * std::cosh(pi * r / rho + iu * c) /
           std::cosh(pi * r / rho - iu * c);
  };
  auto vfn = K.v;
  detail::build_pole_list(K.w, {0.5 * rho - pi / kappa, 0.5 * rho + pi / kappa}, rho, K.w_poles,
                          K.double_pole);
  detail::build_pole_list([vfn](cx k) { return vfn(k) * vfn(-k); }, {pi / rho}, kappa,
                          K.what_poles, K.double_pole);
  detail::validate_kernel(K);
  return K;
}

}  // namespace relcm
