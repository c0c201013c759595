#pragma once

#include "relcm/core.hpp"

namespace relcm {

// Scale pair (a_+, a_-) together with the dimensionless periods (rho, kappa),
// rho*kappa = pi a_-/a_+. Positions map as x = a_- r/rho, spectral variables
// as y = a_- k/kappa, so exp(i pi x y/a_+ a_-) = exp(i r k).
struct ScaleParams {
  double a_plus = 1.0;
  double a_minus = 1.0;
  double rho = pi;
  double kappa = 1.0;

  static ScaleParams from_lengths(double ap, double am, double kap = 1.0) {
    if (!(ap > 0.0) || !(am > 0.0) || !(kap > 0.0))
      throw InvalidParameter("ScaleParams: scale parameters must be positive");
    return {ap, am, pi * am / (ap * kap), kap};
  }
  static ScaleParams from_periods(double rho, double kappa) {
    if (!(rho > 0.0) || !(kappa > 0.0))
      throw InvalidParameter("ScaleParams: periods must be positive");
    // a_- = rho makes x = r; a_+ follows from rho*kappa = pi a_-/a_+.
    return {pi / kappa, rho, rho, kappa};
  }

  ScaleParams swapped() const { return from_lengths(a_minus, a_plus, kappa); }

  double a() const { return 0.5 * (a_plus + a_minus); }
  double rho_kappa() const { return rho * kappa; }
  double tau_of_b(double b) const { return pi * b / a_plus; }

  double a_delta(int delta) const { return delta > 0 ? a_plus : a_minus; }
  double a_max() const { return std::max(a_plus, a_minus); }
  double a_min() const { return std::min(a_plus, a_minus); }

  // reparametrization maps
  double x_of_r(double r) const { return a_minus * r / rho; }
  double y_of_k(double k) const { return a_minus * k / kappa; }
  double r_of_x(double x) const { return rho * x / a_minus; }
  double k_of_y(double y) const { return kappa * y / a_minus; }
  cx x_of_r(cx r) const { return a_minus * r / rho; }
  cx y_of_k(cx k) const { return a_minus * k / kappa; }

  // c_delta, s_delta, e_delta abbreviations
  cx cd(int delta, cx z) const { return std::cosh(pi * z / a_delta(delta)); }
  cx sd(int delta, cx z) const { return std::sinh(pi * z / a_delta(delta)); }
  cx ed(int delta, cx z) const { return std::exp(pi * z / a_delta(delta)); }
  cx c_plus(cx z) const { return cd(+1, z); }
  cx c_minus(cx z) const { return cd(-1, z); }
  cx s_plus(cx z) const { return sd(+1, z); }
  cx s_minus(cx z) const { return sd(-1, z); }
  cx e_plus(cx z) const { return ed(+1, z); }
  cx e_minus(cx z) const { return ed(-1, z); }

  cx plane_wave(cx x, cx y) const { return std::exp(iu * pi * x * y / (a_plus * a_minus)); }
};

}  // namespace relcm
