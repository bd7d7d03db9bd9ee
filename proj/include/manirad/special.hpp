#pragma once

// Classical special-function kernels: Legendre/Gegenbauer recurrences,
// Gauss-Legendre rules, and the dimension count for spherical harmonic
// spaces in arbitrary ambient dimension.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "manirad/core.hpp"

namespace manirad {

// P_0..P_K at x by the three-term recurrence. For |x| <= 1 the values stay
// in [-1, 1], no rescaling needed.
inline std::vector<double> legendre_all(int K, double x) {
  std::vector<double> p(static_cast<std::size_t>(K) + 1);
  p[0] = 1.0;
  if (K >= 1) p[1] = x;
  for (int k = 2; k <= K; ++k)
    p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
  return p;
}

// Gegenbauer C_k^{1/2}; on the sphere this is the zonal kernel and it
// coincides with Legendre P_k.
inline double gegenbauer_half(int k, double x) {
  if (k == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int j = 2; j <= k; ++j) {
    const double q = ((2.0 * j - 1.0) * x * p - (j - 1.0) * pm1) / j;
    pm1 = p;
    p = q;
  }
  return p;
}

struct GaussRule {
  std::vector<double> x;  // nodes in (-1, 1), ascending
  std::vector<double> w;  // weights, sum = 2
};

// Newton iteration from the Chebyshev initial guess; exact for polynomial
// degree 2n - 1.
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dimension of the space of degree-k spherical harmonics on S^n:
//   d_n(k) = (n + 2k - 1) (n + k - 2)! / (k! (n - 1)!)
// Wide arithmetic: values overflow 64 bits already around n = 10, k = 1000.

using uint128 = unsigned __int128;

inline std::string uint128_to_string(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

inline uint128 dim_harmonic_space(int n, int k) {
  if (n < 2 || k < 0) throw precondition_error("dim_harmonic_space: need n >= 2, k >= 0");
  if (k == 0) return 1;
  // (n + 2k - 1) * C(n + k - 2, k) / (n - 1), computed as an exact integer.
  // C(n+k-2, k) = C(n+k-2, n-2) keeps the loop short for small n.
  const int a = n + k - 2;
  const int b = std::min(k, n - 2);
  uint128 binom = 1;
  for (int i = 1; i <= b; ++i) {
    const uint128 num = static_cast<uint128>(a - b + i);
    const uint128 prev = binom;
    binom = binom * num;
    if (num != 0 && binom / num != prev)
      throw std::overflow_error("dim_harmonic_space: 128-bit overflow");
    binom /= i;  // exact: product of i consecutive integers is divisible by i!
  }
  const uint128 f = static_cast<uint128>(n + 2 * k - 1);
  const uint128 prod = binom * f;
  if (f != 0 && prod / f != binom)
    throw std::overflow_error("dim_harmonic_space: 128-bit overflow");
  if (prod % static_cast<uint128>(n - 1) != 0)
    throw std::logic_error("dim_harmonic_space: inexact division");
  return prod / static_cast<uint128>(n - 1);
}

// log Gamma wrapper; the multiplier tables build sign and magnitude
// separately from it.
inline double log_gamma(double x) { return std::lgamma(x); }

}  // namespace manirad
