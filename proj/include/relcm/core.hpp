#pragma once

#include <algorithm>
#include <complex>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace relcm {

using cx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338328;
inline constexpr cx iu{0.0, 1.0};

inline bool is_finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// i^n and (-1)^n for integer n (n may be negative)
inline cx ipow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}
inline double parity(long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// error types

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct NonConvergence : Error { using Error::Error; };
struct InvalidDecay : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct ContourThroughSingularity : Error { using Error::Error; };
struct LadderOverflow : Error { using Error::Error; };
struct NearPole : Error { using Error::Error; };
struct IntegralDivergence : Error { using Error::Error; };
struct DivisionNearZero : Error { using Error::Error; };
struct OutOfWindow : Error { using Error::Error; };
struct DegenerateParameters : Error { using Error::Error; };
struct UnsupportedN : Error { using Error::Error; };
struct IntervalMismatch : Error { using Error::Error; };
struct NonUnitaryKernel : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };
struct KernelInvariantViolation : Error { using Error::Error; };

struct AtPole : Error {
  cx where;
  long k = 0, l = 0;
  AtPole(const std::string& m, cx z, long k_, long l_) : Error(m), where(z), k(k_), l(l_) {}
};

// ---------------------------------------------------------------------------
// deterministic RNG (mt19937_64 bit stream; distribution-free so output is
// identical across standard library implementations)

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int pick(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// thread cap (RELCM_THREADS) and a deterministic parallel map

inline int thread_cap() {
  if (const char* env = std::getenv("RELCM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Applies fn(i) for i in [0, n); results must be written by fn into
// caller-owned slots so the reduction order stays deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int nt = std::min<std::size_t>(thread_cap(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace relcm
