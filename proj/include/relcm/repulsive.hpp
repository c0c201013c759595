#pragma once

#include <memory>

#include "relcm/hyp_gamma.hpp"

namespace relcm {

// coefficient functions of the shift operators
inline cx ado_V(const ScaleParams& p, double b, cx z) {  // sinh type
  cx den = p.s_plus(z);
  if (std::abs(den) < 1e-13) throw DivisionNearZero("ado_V: sinh coefficient pole");
  return p.s_plus(z - iu * b) / den;
}
inline cx ado_V_tilde(const ScaleParams& p, double b, cx z) {  // cosh type
  cx den = p.c_plus(z);
  if (std::abs(den) < 1e-13) throw DivisionNearZero("ado_V_tilde: cosh coefficient pole");
  return p.c_plus(z - iu * b) / den;
}

enum class AdoKind {
  A,         // V(z) T_- + V(-z) T_+           (shift i a_-)
  H,         // w^{1/2} A w^{-1/2}
  H_tilde,   // cosh-coefficient Hamiltonian, weight conjugated
  A_tilde,   // Vt(z) T_- + Vt(-z) T_+
  A_cal,     // T_- + V(-z) T_+ V(z)
  S_cal,     // V(z) T_- V(-z) - T_+
  H_N_free,  // T_- + T_+
  S_N_free,  // T_- - T_+
  free_pair,  // shift i a_+ : T_-^+ + T_+^+
  H_CM,      // dimensionless: shift i rho
  H_hat_CM   // dimensionless: shift i kappa, difference
};

struct AdoSpec {
  AdoKind kind = AdoKind::A;
  ScaleParams params;
  double b = 0.0;
  // canonical weight branch for the conjugated kinds (H, H_tilde)
  std::function<cx(cx)> weight_sqrt;
};

// Applies the analytic difference operator to f at z. T_∓ shifts the argument
// by ∓ i a_- (or the kind's own step).
inline cx apply_ado(const AdoSpec& s, const std::function<cx(cx)>& f, cx z) {
  const ScaleParams& p = s.params;
  const cx sm = iu * p.a_minus;
  switch (s.kind) {
    case AdoKind::A:
      return ado_V(p, s.b, z) * f(z - sm) + ado_V(p, s.b, -z) * f(z + sm);
    case AdoKind::A_tilde:
      return ado_V_tilde(p, s.b, z) * f(z - sm) + ado_V_tilde(p, s.b, -z) * f(z + sm);
    case AdoKind::H: {
      cx w0 = s.weight_sqrt(z);
      return w0 * (ado_V(p, s.b, z) * f(z - sm) / s.weight_sqrt(z - sm) +
                   ado_V(p, s.b, -z) * f(z + sm) / s.weight_sqrt(z + sm));
    }
    case AdoKind::H_tilde: {
      cx w0 = s.weight_sqrt(z);
      return w0 * (ado_V_tilde(p, s.b, z) * f(z - sm) / s.weight_sqrt(z - sm) +
                   ado_V_tilde(p, s.b, -z) * f(z + sm) / s.weight_sqrt(z + sm));
    }
    case AdoKind::A_cal:
      return f(z - sm) + ado_V(p, s.b, -z) * ado_V(p, s.b, z + sm) * f(z + sm);
    case AdoKind::S_cal:
      return ado_V(p, s.b, z) * ado_V(p, s.b, sm - z) * f(z - sm) - f(z + sm);
    case AdoKind::H_N_free:
      return f(z - sm) + f(z + sm);
    case AdoKind::S_N_free:
      return f(z - sm) - f(z + sm);
    case AdoKind::free_pair:
      return f(z - iu * p.a_plus) + f(z + iu * p.a_plus);
    case AdoKind::H_CM:
      return f(z - iu * p.rho) + f(z + iu * p.rho);
    case AdoKind::H_hat_CM:
      return f(z - iu * p.kappa) - f(z + iu * p.kappa);
  }
  throw InvalidParameter("apply_ado: unknown kind");
}

// ---------------------------------------------------------------------------
// Repulsive (same-charge) sector: renormalized conical function R_ren, the
// Harish-Chandra function c, weight w, scattering function u, and the E/F/Z
// companions.
class RepulsiveEvaluator {
 public:
  RepulsiveEvaluator(ScaleParams p, double b, double fn_tol = 1e-13, double int_tol = 1e-12)
      : p_(p), b_(b), fn_tol_(fn_tol), int_tol_(int_tol),
        gamma_(std::make_shared<HypGammaEvaluator>(p, fn_tol)) {}

  const ScaleParams& params() const { return p_; }
  double b() const { return b_; }
  const HypGammaEvaluator& gamma() const { return *gamma_; }

  cx G(cx z) const { return gamma_->value(z); }

  // c(b; z) = G(z + ia - ib) / G(z + ia)
  cx harish_c(cx z) const {
    return G(z + iu * (p_.a() - b_)) / G(z + iu * p_.a());
  }
  cx weight_w(cx z) const { return 1.0 / (harish_c(z) * harish_c(-z)); }
  cx weight_w_sqrt(cx z) const { return std::sqrt(weight_w(z)); }

  // phi(b) = exp(i pi b (b - 2a) / 2 a_+ a_-)
  cx phase_phi() const {
    return std::exp(iu * pi * b_ * (b_ - 2.0 * p_.a()) / (2.0 * p_.a_plus * p_.a_minus));
  }

  // u(b;z) = -c(z)/c(-z). On the real line this reduces (via the shift
  // equations) to a single stable quadrature with |u| = 1 built in; complex
  // arguments fall back to the G-ratio.
  cx scattering_u(cx z) const {
    if (std::abs(z.imag()) < 1e-14) return scattering_u_real(z.real());
    return scattering_u_ratio(z);
  }
  cx scattering_u_ratio(cx z) const {
    double alpha = p_.a() - b_, beta = 0.5 * (p_.a_minus - p_.a_plus);
    return G(z + iu * alpha) * G(z - iu * alpha) /
           (G(z + iu * beta) * G(z - iu * beta));
  }
  cx scattering_u_real(double z) const {
    double ap = p_.a_plus, am = p_.a_minus;
    double alpha = p_.a() - b_, beta = 0.5 * (am - ap);
    double decay = (ap + am) - 2.0 * std::max(std::abs(alpha), std::abs(beta));
    if (!(decay > 0.0)) throw IntegralDivergence("scattering_u: b outside (0, 2a)");
    auto f = [&](double y) -> cx {
      return 2.0 * std::sin(2.0 * y * z) * std::sinh(y * (alpha + beta)) *
             std::sinh(y * (alpha - beta)) / (y * std::sinh(ap * y) * std::sinh(am * y));
    };
    double Y = (std::log(1.0 / fn_tol_) + 6.0) / decay;
    QuadResult q = integrate_gl_adaptive(f, 0.0, Y, fn_tol_, 8);
    return std::exp(iu * q.value);
  }

  // R_ren(b; x, y): direct contour integral inside the safe strip,
  // shift-equation ladder outside it. Even in x and y.
  cx r_ren(cx x, cx y) const {
    if (!(b_ > 0.0) || !(b_ < 2.0 * p_.a()))
      throw IntegralDivergence("r_ren: integral representation needs b in (0, 2a)");
    check_r_pole(x);
    check_r_pole(y);
    if (x.imag() < 0.0) x = -x;
    if (y.imag() < 0.0) y = -y;
    if (y.imag() > x.imag()) std::swap(x, y);  // self-duality; ladder in the worse variable
    double margin = 0.12 * std::min(p_.a_min(), 2.0 * p_.a() - b_);
    double budget = 2.0 * p_.a() - b_ - margin;
    if (x.imag() + y.imag() <= budget) return r_integral(x, y);

    double bx = budget - y.imag();
    // ladder step i a_- (eigenvalue 2 c_+(y)) or the modular-partner step
    // i a_+ (eigenvalue 2 c_-(y)); both base points x - i n step and
    // x - i (n+1) step must land with |Im| <= bx
    double step = 0.0;
    int dir = 0;
    long n = 0;
    for (auto [cand_step, cand_dir] : {std::pair{p_.a_minus, +1}, std::pair{p_.a_plus, -1}}) {
      long nlo = static_cast<long>(std::ceil((x.imag() - bx) / cand_step - 1e-12));
      long nhi = static_cast<long>(std::floor((x.imag() + bx) / cand_step + 1e-12)) - 1;
      nlo = std::max<long>(0, nlo);
      if (nlo <= nhi) {
        step = cand_step;
        dir = cand_dir;
        n = nlo;
        break;
      }
    }
    if (dir == 0) throw NonConvergence("r_ren: no admissible ladder base points");
    cx E = 2.0 * p_.cd(dir, y);
    ScaleParams pv = dir > 0 ? p_ : p_.swapped();  // V(a_+,b;.) or V(a_-,b;.)
    // bases g_{n+1}, g_n with g_k = R(x - i k step), then walk up
    auto base = [&](long k) {
      cx xb = x - iu * (static_cast<double>(k) * step);
      if (xb.imag() < 0.0) xb = -xb;
      return r_integral(xb, y);
    };
    cx g2 = base(n + 1), g1 = base(n);
    for (long k = n - 1; k >= 0; --k) {
      cx w = x - iu * (static_cast<double>(k + 1) * step);
      cx g0 = (E * g1 - ado_V(pv, b_, w) * g2) / ado_V(pv, b_, -w);
      g2 = g1;
      g1 = g0;
    }
    return g1;
  }

  // E(b; x, y) = phi(b) R_ren(x, y) / (c(x) c(y))
  cx e_function(cx x, cx y) const {
    return phase_phi() * r_ren(x, y) / (harish_c(x) * harish_c(y));
  }
  // F(b; x, y) = w(x)^{1/2} w(y)^{1/2} R_ren(x, y)
  cx f_function(cx x, cx y) const {
    return weight_w_sqrt(x) * weight_w_sqrt(y) * r_ren(x, y);
  }
  // Z(b; x, y) = R_ren(x, y) / c(b; -y)
  cx z_function(cx x, cx y) const { return r_ren(x, y) / harish_c(-y); }

  AdoSpec ado(AdoKind kind) const {
    AdoSpec s{kind, p_, b_, {}};
    if (kind == AdoKind::H)
      s.weight_sqrt = [self = *this](cx z) { return self.weight_w_sqrt(z); };
    return s;
  }

 private:
  ScaleParams p_;
  double b_;
  double fn_tol_, int_tol_;
  std::shared_ptr<HypGammaEvaluator> gamma_;

  void check_r_pole(cx z) const {
    // poles only at +-z = i(2a - b + k a_+ + l a_-)
    if (std::abs(z.real()) > 1e-9) return;
    double im = std::abs(z.imag());
    double base = 2.0 * p_.a() - b_;
    if (im < base - 1e-9) return;
    long kmax = static_cast<long>(std::floor((im - base) / p_.a_plus)) + 1;
    for (long k = 0; k <= kmax; ++k) {
      double rem = im - base - k * p_.a_plus;
      long l0 = static_cast<long>(std::floor(rem / p_.a_minus));
      for (long l : {l0, l0 + 1}) {
        if (l < 0) continue;
        if (std::abs(im - (base + k * p_.a_plus + l * p_.a_minus)) < 1e-9)
          throw NearPole("r_ren: argument within 1e-9 of a pole of R_ren");
      }
    }
  }

  cx r_integral(cx x, cx y) const {
    const double ap = p_.a_plus, am = p_.a_minus;
    cx hd = 0.5 * (x - y), hs = 0.5 * (x + y), hb = 0.5 * iu * b_;
    auto f = [&](double z) -> cx {
      cx zz{z, 0.0};
      return G(zz + hd - hb) * G(zz - hd - hb) / (G(zz + hs + hb) * G(zz - hs + hb));
    };
    double decay = 2.0 * pi * b_ / (ap * am);
    QuadResult q = integrate_real_line(f, 0.8 * decay, int_tol_);
    return G(iu * (p_.a() - b_)) / std::sqrt(ap * am) * q.value;
  }
};

}  // namespace relcm
