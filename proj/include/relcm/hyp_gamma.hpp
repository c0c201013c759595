#pragma once

#include <optional>

#include "relcm/quadrature.hpp"
#include "relcm/scale.hpp"

namespace relcm {

// Hyperbolic gamma function G(a_+, a_-; z).
//
// Inside the strip |Im z| < a it is computed from the integral representation
//   log G(z) = i Int_0^inf dy [ sin(2yz) / (2 y sinh(a_+ y) sinh(a_- y))
//                               - z / (a_+ a_- y^2) ],
// outside via the first-order shift equations
//   G(z + i a_d/2) / G(z - i a_d/2) = 2 cosh(pi z / a_{-d}).
// For large |Re z| the evaluator switches to
//   G(z) ~ exp(-+ i (chi + pi z^2 / 2 a_+ a_-)),  chi = (pi/24)(a_+/a_- + a_-/a_+).
//
// Poles sit at -i(a + k a_+ + l a_-), zeros at +i(a + k a_+ + l a_-), k,l >= 0,
// all on the imaginary axis. Within 1e-9 of either the evaluator refuses.
class HypGammaEvaluator {
 public:
  explicit HypGammaEvaluator(ScaleParams p, double tol = 1e-13, int ladder_limit = 64)
      : p_(p), tol_(tol), ladder_limit_(ladder_limit) {
    // the large-|Re z| form has relative error O(e^{-r |Re z|}) with
    // r just below 2 pi / a_max; the +5 absorbs the implied constant
    asym_switch_ = std::max(3.0 * p_.a_max(),
                            (std::log(1.0 / tol_) + 5.0) * p_.a_max() / (2.0 * pi));
  }

  const ScaleParams& params() const { return p_; }
  double chi() const { return pi / 24.0 * (p_.a_plus / p_.a_minus + p_.a_minus / p_.a_plus); }

  // exp(-+ i (chi + pi z^2/2 a_+ a_-)); sign = +1 for the Re z -> +inf branch
  cx asymptotic(cx z, int sign) const {
    cx phase = chi() + pi * z * z / (2.0 * p_.a_plus * p_.a_minus);
    return std::exp(cx(0.0, sign > 0 ? -1.0 : 1.0) * phase);
  }

  // distance to the nearest pole (-ia - ik a_+ - il a_-) or zero (mirror image)
  struct Singularity {
    double dist;
    long k, l;
    bool is_pole;
  };
  std::optional<Singularity> nearest_singularity(cx z, double radius = 1e-6) const {
    double re = std::abs(z.real());
    if (re > radius) return std::nullopt;  // all poles/zeros are purely imaginary
    double im = std::abs(z.imag());
    bool pole_side = z.imag() < 0.0;
    double a = p_.a();
    if (im < a - radius) return std::nullopt;
    Singularity best{std::numeric_limits<double>::infinity(), 0, 0, pole_side};
    long kmax = static_cast<long>(std::floor((im - a) / p_.a_plus)) + 1;
    for (long k = 0; k <= kmax; ++k) {
      double rem = im - a - k * p_.a_plus;
      long l0 = static_cast<long>(std::floor(rem / p_.a_minus));
      for (long l : {l0, l0 + 1}) {
        if (l < 0) continue;
        double d = std::hypot(re, im - (a + k * p_.a_plus + l * p_.a_minus));
        if (d < best.dist) best = {d, k, l, pole_side};
      }
    }
    if (best.dist <= radius) return best;
    return std::nullopt;
  }

  cx value(cx z) const {
    if (!is_finite(z)) throw NonFiniteValue("hyp_gamma: non-finite argument");
    if (auto s = nearest_singularity(z, 1e-9)) {
      throw AtPole(s->is_pole ? "hyp_gamma: argument within 1e-9 of a pole"
                              : "hyp_gamma: argument within 1e-9 of a zero",
                   z, s->k, s->l);
    }
    if (z.imag() < 0.0) return 1.0 / eval_upper(-z);  // reflection G(-z) = 1/G(z)
    return eval_upper(z);
  }

  cx log_value_strip(cx z) const { return log_gamma_strip(z); }

 private:
  ScaleParams p_;
  double tol_;
  int ladder_limit_;
  double asym_switch_;

  // Im z >= 0, off zeros. Ladder down with the larger scale until the
  // argument is inside |Im z| <= a_max/2, then integral or asymptotics.
  cx eval_upper(cx z) const {
    double am = p_.a_max();
    int delta = p_.a_plus >= p_.a_minus ? +1 : -1;  // shift direction: a_delta = a_max
    double band = 0.5 * am;
    long steps = 0;
    if (z.imag() > band) {
      steps = static_cast<long>(std::ceil((z.imag() - band) / am - 1e-12));
      if (steps > ladder_limit_)
        throw LadderOverflow("hyp_gamma: |Im z| requires more ladder steps than ladder_limit");
    }
    cx factor = 1.0;
    for (long j = 1; j <= steps; ++j)
      factor *= 2.0 * p_.cd(-delta, z - iu * ((j - 0.5) * am));
    cx zr = z - iu * (static_cast<double>(steps) * am);
    return factor * core(zr);
  }

  cx core(cx z) const {
    if (std::abs(z.real()) >= asym_switch_) return asymptotic(z, z.real() > 0 ? +1 : -1);
    return std::exp(log_gamma_strip(z));
  }

  // integral representation; requires |Im z| < a strictly (decay rate
  // d = a_+ + a_- - 2|Im z| > 0)
  cx log_gamma_strip(cx z) const {
    double d = p_.a_plus + p_.a_minus - 2.0 * std::abs(z.imag());
    if (!(d > 0.0)) throw Error("hyp_gamma: argument outside the integral strip");
    if (std::abs(z) < 1e-300) return 0.0;

    const double ap = p_.a_plus, am = p_.a_minus;
    const double y0 = 0.5 / std::max({2.0 * std::abs(z), ap, am});
    // f = z/(a_+ a_- y^2) (S(2yz) B(a_+ y) B(a_- y) - 1) with S = sin(w)/w,
    // B = v/sinh(v): the only cancellation left is the (P - 1) difference
    auto integrand = [&](double y) -> cx {
      if (y < y0) return small_y_series(z, y);
      cx w = 2.0 * y * z;
      cx S = std::sin(w) / w;
      double vp = ap * y, vm = am * y;
      double Bp = vp / std::sinh(vp), Bm = vm / std::sinh(vm);
      return z / (ap * am * y * y) * (S * Bp * Bm - 1.0);
    };
    // absolute target follows |log G| ~ pi |z|^2 / 2 a_+ a_- so the relative
    // accuracy of G stays near 1e-13
    double tol_eff = std::max(tol_, 1e-14 * (1.0 + std::norm(z) * pi / (ap * am)));
    const double Y = (std::log(1.0 / tol_) + 6.0) / d;
    QuadResult q = integrate_gl_adaptive(integrand, 0.0, Y, tol_eff, 8);
    // closed-form tail of the subtracted term; the sinh term is below tol there
    cx tail = -z / (ap * am * Y);
    return iu * (q.value + tail);
  }

  // series for the combined integrand near y = 0 (direct evaluation cancels
  // catastrophically): f(y) = z/(a_+ a_- y^2) [S(2yz) B(a_+ y) B(a_- y) - 1]
  cx small_y_series(cx z, double y) const {
    const double ap = p_.a_plus, am = p_.a_minus;
    // S(w) = sin(w)/w, B(v) = v/sinh(v), truncated in powers of y^2
    constexpr int K = 9;
    cx S[K], P[K];
    double Bp[K], Bm[K];
    // sin(w)/w = sum (-1)^n w^{2n}/(2n+1)!
    cx w2 = 4.0 * z * z * y * y;
    S[0] = 1.0;
    cx t = 1.0;
    double fact = 1.0;
    for (int n = 1; n < K; ++n) {
      t *= -w2;
      fact *= (2.0 * n) * (2.0 * n + 1.0);
      S[n] = t / fact;
    }
    auto bser = [&](double a, double out[K]) {
      // v/sinh(v) = 1/(sum v^{2n}/(2n+1)!); invert the series
      double c[K];
      double v2 = a * a * y * y, tt = 1.0, ff = 1.0;
      c[0] = 1.0;
      for (int n = 1; n < K; ++n) {
        tt *= v2;
        ff *= (2.0 * n) * (2.0 * n + 1.0);
        c[n] = tt / ff;
      }
      out[0] = 1.0;
      for (int n = 1; n < K; ++n) {
        double acc = 0.0;
        for (int m = 1; m <= n; ++m) acc += c[m] * out[n - m];
        out[n] = -acc;
      }
    };
    bser(ap, Bp);
    bser(am, Bm);
    for (int n = 0; n < K; ++n) {
      cx acc = 0.0;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) acc += S[i] * Bp[j] * Bm[n - i - j];
      P[n] = acc;
    }
    cx sum = 0.0;
    for (int n = K - 1; n >= 1; --n) sum += P[n];
    return z / (ap * am * y * y) * sum;
  }
};

}  // namespace relcm
