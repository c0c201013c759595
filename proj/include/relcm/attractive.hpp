#pragma once

#include "relcm/repulsive.hpp"

namespace relcm {

struct Amplitudes {
  cx t, r, u;
};

// Attractive (opposite-charge) sector for general coupling b in
// (-a_+/2, a_- + a_+/2): joint eigenfunction psi(b; x, y), transmission and
// reflection amplitudes, Yang-Baxter and time-reversal residuals.
class AttractiveEvaluator {
 public:
  AttractiveEvaluator(ScaleParams p, double b, double fn_tol = 1e-13, double int_tol = 1e-12)
      : rep_(p, b, fn_tol, int_tol), b_(b) {
    if (!(b > -0.5 * p.a_plus) || !(b < p.a_minus + 0.5 * p.a_plus))
      throw OutOfWindow("AttractiveEvaluator: b outside (-a_+/2, a_- + a_+/2)");
  }

  const ScaleParams& params() const { return rep_.params(); }
  const RepulsiveEvaluator& repulsive() const { return rep_; }
  double b() const { return b_; }

  // attractive weight and c-function
  cx w_tilde(cx x) const {
    const ScaleParams& p = params();
    cx half = 0.5 * iu * p.a_minus, ib = iu * b_;
    return rep_.G(x + half) / rep_.G(x + half - ib) * rep_.G(-x + half) /
           rep_.G(-x + half - ib);
  }
  cx w_tilde_sqrt(cx x) const { return std::sqrt(w_tilde(x)); }
  cx c_tilde(cx x) const { return rep_.harish_c(x - 0.5 * iu * params().a_plus); }

  // psi / w_tilde^{1/2}: the square-root-free core of the eigenfunction
  cx psi_core(cx x, cx y) const {
    const ScaleParams& p = params();
    cx ib = iu * b_;
    cx s = p.s_minus(ib - y);
    if (std::abs(s) < 1e-12) throw DivisionNearZero("psi: s_-(ib - y) vanishes");
    cx cb = rep_.harish_c(-y);
    cx num = p.e_minus(0.5 * (ib - y)) * rep_.r_ren(x + 0.5 * iu * p.a_plus, y) -
             p.e_minus(0.5 * (y - ib)) * rep_.r_ren(x - 0.5 * iu * p.a_plus, y);
    return num / (2.0 * s * cb);
  }

  cx psi(cx x, cx y) const { return w_tilde_sqrt(x) * psi_core(x, y); }

  // the two building blocks psi_{+-}
  cx psi_pm(int sign, cx x, cx y) const {
    const ScaleParams& p = params();
    cx ib = iu * b_;
    cx s = p.s_minus(ib - y);
    if (std::abs(s) < 1e-12) throw DivisionNearZero("psi_pm: s_-(ib - y) vanishes");
    double sg = sign > 0 ? 1.0 : -1.0;
    return sg * w_tilde_sqrt(x) * p.e_minus(0.5 * sg * (ib - y)) / (2.0 * s) *
           rep_.z_function(x + sg * 0.5 * iu * p.a_plus, y);
  }

  Amplitudes amplitudes(cx y) const {
    const ScaleParams& p = params();
    // u(b; 0) is taken as the symmetric limit along the real axis
    cx u;
    if (std::abs(y) < 1e-8 && std::abs(y.imag()) < 1e-14) {
      double eps = 1e-5;
      u = 0.5 * (rep_.scattering_u(cx(eps, 0.0)) + rep_.scattering_u(cx(-eps, 0.0)));
    } else {
      u = rep_.scattering_u(y);
    }
    cx ib = iu * b_;
    cx den = p.s_minus(ib - y);
    if (std::abs(den) < 1e-12) throw DivisionNearZero("amplitudes: s_-(ib - y) vanishes");
    cx t = p.s_minus(y) / den * u;
    cx r = p.s_minus(ib) / den * u;
    return {t, r, u};
  }

  // lhs - rhs of the two (u, t, r) Yang-Baxter equations with
  // s_jk = s(y_j - y_k)
  std::pair<cx, cx> yang_baxter_residual(cx y1, cx y2, cx y3) const {
    Amplitudes a12 = amplitudes(y1 - y2), a13 = amplitudes(y1 - y3), a23 = amplitudes(y2 - y3);
    cx res1 = a12.r * a13.t * a23.u - a23.t * a13.u * a12.r - a23.r * a13.r * a12.t;
    cx res2 = a12.u * a13.r * a23.u - a23.t * a13.r * a12.t - a23.r * a13.u * a12.r;
    return {res1, res2};
  }

  // psi(x,y) - t(y) psi(-x,-y) + r(y) psi(x,-y)
  cx time_reversal_residual(cx x, cx y) const {
    Amplitudes a = amplitudes(y);
    return psi(x, y) - a.t * psi(-x, -y) + a.r * psi(x, -y);
  }

  // psi minus its dominant plane-wave form; side = +1 for Re x -> +inf
  cx psi_asymptotic_defect(cx x, cx y, int side) const {
    const ScaleParams& p = params();
    Amplitudes a = amplitudes(y);
    if (side > 0) return psi(x, y) - a.t * p.plane_wave(x, y);
    return psi(x, y) - (p.plane_wave(x, y) - a.r * p.plane_wave(x, -y));
  }

  AdoSpec ado_H_tilde() const {
    AdoSpec s{AdoKind::H_tilde, params(), b_, {}};
    s.weight_sqrt = [self = *this](cx z) { return self.w_tilde_sqrt(z); };
    return s;
  }
  AdoSpec ado_S_cal() const { return AdoSpec{AdoKind::S_cal, params(), b_, {}}; }

 private:
  RepulsiveEvaluator rep_;
  double b_;
};

}  // namespace relcm
