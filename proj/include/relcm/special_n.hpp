#pragma once

#include "relcm/repulsive.hpp"

namespace relcm {

// (N+1) x (N+1) coefficient matrix c^{(N)}_{kl} evaluated at q = e_-(i a_+)
struct CoeffMatrix {
  int N = 0;
  cx q{1.0, 0.0};
  std::vector<cx> entries;  // row-major (N+1)^2
  cx at(int k, int l) const { return entries[static_cast<std::size_t>(k) * (N + 1) + l]; }
  cx& at(int k, int l) { return entries[static_cast<std::size_t>(k) * (N + 1) + l]; }
};

// Builds c^{(N)} by expanding row k = 0 from the summation identity
//   sum_l c_{0l} e_-((N-2l) y) = prod_{j=1}^{N} 2 s_-(y + i j a_+)
// and filling the remaining rows from the Fourier-mode matching of the
// K_N shift equation
//   s_-(x+iNa_+) K_N(x-ia_+,y) + s_-(x-iNa_+) K_N(x+ia_+,y) = 2 s_-(x) c_-(y) K_N(x,y).
inline CoeffMatrix compute_coeffs(const ScaleParams& p, int N) {
  if (N < 0 || N > 12) throw UnsupportedN("compute_coeffs: N must be in [0, 12]");
  auto qp = [&](long j) { return std::polar(1.0, pi * j * p.a_plus / p.a_minus); };
  CoeffMatrix c;
  c.N = N;
  c.q = qp(1);
  c.entries.assign(static_cast<std::size_t>(N + 1) * (N + 1), cx(0.0, 0.0));

  // row 0: Laurent product, coefficient of u^{N-2l} with u = e_-(y)
  std::vector<cx> row{cx(1.0, 0.0)};
  for (int j = 1; j <= N; ++j) {
    std::vector<cx> next(row.size() + 1, cx(0.0, 0.0));
    for (std::size_t l = 0; l < row.size(); ++l) {
      next[l] += qp(j) * row[l];
      next[l + 1] -= qp(-j) * row[l];
    }
    row = std::move(next);
  }
  for (int l = 0; l <= N; ++l) c.at(0, l) = row[l];

  auto get = [&](int k, int l) -> cx {
    if (k < 0 || l < 0 || k > N || l > N) return 0.0;
    return c.at(k, l);
  };
  for (int m = 1; m <= N; ++m) {
    cx denom = qp(2 * m) - 1.0;
    if (std::abs(denom) < 1e-9)
      throw DegenerateParameters("compute_coeffs: m a_+ in a_- N, mode-matching system singular");
    for (int n = 0; n <= N; ++n) {
      c.at(m, n) = ((qp(2 * m - 2 - 2 * N) - 1.0) * get(m - 1, n) +
                    (1.0 - qp(-2 * m)) * get(m, n - 1) +
                    (qp(2 * N - 2 * m + 2) - 1.0) * get(m - 1, n - 1)) /
                   denom;
    }
  }
  return c;
}

struct AmplitudesN {
  cx u, t, r;
};

struct BoundState {
  std::function<cx(cx)> psi;  // branch-tracked across i a_- shifts
  double norm;                // (Psi_N, Psi_N)_1 in the (r,k) normalization
  double energy;              // E_N
};

// Elementary machinery at b = (N+1) a_+: K_N / Sigma_N, the weight w_N and
// dual v_N, psi_N and its plane-wave coefficients, amplitudes, asymptotic
// constants, the bound state.
class SpecialNEvaluator {
 public:
  SpecialNEvaluator(ScaleParams p, int N) : p_(p), N_(N), coeffs_(compute_coeffs(p, N)) {
    restriction_ok_ = true;
    for (int j = 1; j <= 2 * N_; ++j) {
      double t = j * p_.a_plus / p_.a_minus;
      if (std::abs(t - std::round(t)) < 1e-9 && std::round(t) >= 1.0) restriction_ok_ = false;
    }
  }

  const ScaleParams& params() const { return p_; }
  int N() const { return N_; }
  const CoeffMatrix& coeffs() const { return coeffs_; }
  bool restriction_ok() const { return restriction_ok_; }
  double b() const { return (N_ + 1) * p_.a_plus; }

  cx sigma(cx x, cx y) const {
    cx acc = 0.0;
    for (int k = 0; k <= N_; ++k)
      for (int l = 0; l <= N_; ++l)
        acc += coeffs_.at(k, l) * p_.e_minus(cx(N_ - 2 * k) * x + cx(N_ - 2 * l) * y);
    return acc;
  }
  cx k_fn(cx x, cx y) const { return p_.plane_wave(x, y) * sigma(x, y); }

  cx w_n(cx x) const {
    cx prod = 1.0;
    for (int j = 0; j <= N_; ++j) {
      cx off = iu * ((j + 0.5) * p_.a_plus);
      prod *= 4.0 * p_.s_minus(x + off) * p_.s_minus(x - off);
    }
    return 1.0 / prod;
  }
  cx w_n_sqrt(cx x) const { return std::sqrt(w_n(x)); }

  cx v_n(cx y) const {
    cx prod = 1.0;
    for (int j = 1; j <= N_ + 1; ++j) prod *= 2.0 * iu * p_.s_minus(y - iu * (j * p_.a_plus));
    return 1.0 / prod;
  }

  // entire plane-wave coefficients of psi_N
  cx ell(int tau, cx x, cx y) const {
    cx acc = 0.0;
    double tv = tau > 0 ? 1.0 : -1.0;
    for (int ds = 0; ds < 2; ++ds) {
      double dv = ds == 0 ? 1.0 : -1.0;
      acc += 2.0 * dv * p_.s_minus(x - iu * (dv * (N_ + 0.5) * p_.a_plus)) *
             p_.e_minus(0.5 * dv * (iu * ((N_ + 1) * p_.a_plus) - y)) *
             p_.e_minus(-0.5 * dv * tv * y) * sigma(x + iu * (0.5 * dv * p_.a_plus), tv * y);
    }
    return parity(N_) * ipow(N_ + 1) * tv * acc;
  }
  cx lambda(int tau, cx x, cx y) const {
    double tv = tau > 0 ? 1.0 : -1.0;
    return std::exp(iu * tv * pi * x * y / (p_.a_plus * p_.a_minus)) * ell(tau, x, y);
  }

  cx psi(cx x, cx y) const {
    return w_n_sqrt(x) * v_n(y) * (lambda(+1, x, y) + lambda(-1, x, y));
  }

  cx u_n(cx y) const {
    cx prod = 1.0;
    for (int j = 1; j <= N_; ++j) {
      cx off = iu * (j * p_.a_plus);
      cx den = p_.s_minus(off - y);
      if (std::abs(den) < 1e-13) throw DivisionNearZero("u_n: s_-(i j a_+ - y) vanishes");
      prod *= p_.s_minus(off + y) / den;
    }
    return prod;
  }

  AmplitudesN amplitudes_n(cx y) const {
    cx u = u_n(y);
    cx off = iu * ((N_ + 1) * p_.a_plus);
    cx den = p_.s_minus(off - y);
    if (std::abs(den) < 1e-13)
      throw DivisionNearZero("amplitudes_n: s_-(i(N+1)a_+ - y) vanishes");
    return {u, p_.s_minus(y) / den * u, p_.s_minus(off) / den * u};
  }

  // C_N(x) and the unimodular U_N(x) = C_N^2 w_N governing large-Re y behavior
  cx c_n(cx x) const {
    cx prod = 1.0;
    for (int j = 0; j <= N_; ++j) prod *= 2.0 * p_.s_minus(x + iu * ((j + 0.5) * p_.a_plus));
    return parity(N_ + 1) * p_.e_minus(iu * (0.5 * (N_ + 1) * (N_ + 1) * p_.a_plus)) * prod;
  }
  cx u_big(cx x) const {
    cx prod = 1.0;
    for (int j = 0; j <= N_; ++j) {
      cx off = iu * ((j + 0.5) * p_.a_plus);
      prod *= p_.s_minus(x + off) / p_.s_minus(x - off);
    }
    return p_.e_minus(iu * ((N_ + 1) * (N_ + 1) * p_.a_plus)) * prod;
  }

  cx p_n() const {
    cx prod = 1.0;
    for (int j = N_ + 1; j <= 2 * N_ + 1; ++j) prod *= 2.0 * p_.s_minus(iu * (j * p_.a_plus));
    return prod;
  }

  bool in_bound_window() const {
    return p_.a_minus > (N_ + 0.5) * p_.a_plus && p_.a_minus < (N_ + 1) * p_.a_plus;
  }

  BoundState bound_state() const {
    if (!in_bound_window())
      throw OutOfWindow("bound_state: a_- outside ((N+1/2) a_+, (N+1) a_+)");
    double rk = p_.rho_kappa();
    double num = pi, den = p_.kappa;
    for (int j = 1; j <= N_; ++j) num *= std::sin(j * pi * pi / rk);
    for (int j = N_ + 1; j <= 2 * N_ + 1; ++j) den *= std::sin(j * pi * pi / rk);
    double norm = parity(N_ + 1) * num / den;
    double energy = 2.0 * parity(N_ + 1) * std::cos(pi * p_.a_minus / p_.a_plus);
    int Nl = N_;
    ScaleParams p = p_;
    auto self = *this;
    // analytic continuation of w_N^{1/2} across x -> x + i m a_- picks up
    // (-1)^{(N+1) m}; the pointwise principal root alone is i a_- periodic
    auto handle = [self, p, Nl](cx x) -> cx {
      long m = std::lround(x.imag() / p.a_minus);
      double sign = parity((Nl + 1) * m);
      return sign * 2.0 * p.c_plus(x) * self.w_n_sqrt(x);
    };
    return {handle, norm, energy};
  }

  // residue of psi_N(x, .) at y = i(N+1)a_+ - i a_- equals this factor times
  // the bound state 2 c_+(x) w_N(x)^{1/2}
  cx bound_residue_factor() const {
    double r = p_.a_plus / p_.a_minus;
    cx num = iu * p_.a_minus, den = pi;
    for (int j = N_ + 1; j <= 2 * N_ + 1; ++j) num *= std::sin(j * pi * r);
    for (int j = 1; j <= N_; ++j) den *= std::sin(j * pi * r);
    return parity(N_ + 1) * num / den;
  }

  AdoSpec ado_H_N_free() const { return AdoSpec{AdoKind::H_N_free, p_, b(), {}}; }
  AdoSpec ado_S_N_free() const { return AdoSpec{AdoKind::S_N_free, p_, b(), {}}; }

 private:
  ScaleParams p_;
  int N_;
  CoeffMatrix coeffs_;
  bool restriction_ok_;
};

// Reflectionless eigenfunction at b = (N+1) a_-; also a joint eigenfunction
// of the two free shift pairs with step i a_+.
inline cx psi_reflectionless(const ScaleParams& p, int N, cx x, cx y) {
  CoeffMatrix cs = compute_coeffs(p.swapped(), N);  // entries at q = e_+(i a_-)
  cx num = 0.0;
  for (int k = 0; k <= N; ++k)
    for (int l = 0; l <= N; ++l)
      num += parity(k) * cs.at(k, l) * p.e_plus(cx(N - 2 * k) * x + cx(N - 2 * l) * y);
  cx den = 1.0;
  for (int j = 1; j <= N; ++j) {
    cx off = iu * (j * p.a_minus);
    cx sy = p.s_plus(y - off);
    if (std::abs(sy) < 1e-13) throw NearPole("psi_reflectionless: s_+(y - i j a_-) vanishes");
    den *= 2.0 * sy * std::sqrt(4.0 * p.c_plus(x - off) * p.c_plus(x + off));
  }
  return p.plane_wave(x, y) * num / den;
}

}  // namespace relcm
