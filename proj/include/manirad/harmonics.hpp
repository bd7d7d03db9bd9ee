#pragma once

// Orthonormal harmonic families for the three manifolds.
//
// S^2: real spherical harmonics Y_k^i, i = 1..2k+1, orthonormal under the
// normalized measure, so Y_0^1 = 1 and sum_i Y_k^i(x)^2 = 2k+1. The slot i
// maps to the classical order m = i - k - 1; m < 0 are the sin(|m| phi)
// functions, m > 0 the cos(m phi) ones, no Condon-Shortley phase.
//
// SO(3): matrix coefficients of the rotation action on each degree-k space.
// D^{(k)}(g) is the real orthogonal matrix with
//     Y_k^i(g^{-1} x) = sum_j D^{(k)}_{ij}(g) Y_k^j(x),
// so D(e) = I and D(g h) = D(h) D(g) entrywise. sqrt(2k+1) D^{(k)}_{ij} is
// an orthonormal family under normalized Haar measure.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "manirad/core.hpp"
#include "manirad/special.hpp"

namespace manirad {

// Stability cap for the degree recurrences.
inline constexpr int legendre_degree_cap = 200;
inline constexpr int wigner_degree_cap = 128;

// Normalized associated Legendre values N_k^m(x) for all 0 <= m <= k <= K,
// where N_k^m = sqrt((2k+1) (k-m)!/(k+m)!) P_k^m (no Condon-Shortley).
// Layout: column-major in m, entry(k, m) at offset m*(K+1) - m(m-1)/2 + (k-m).
// The recurrences run in increasing k for fixed m and are normalized on the
// fly, which keeps every intermediate in [-sqrt(2k+1), sqrt(2k+1)].
struct LegendreBlock {
  int K = 0;
  std::vector<double> v;
  double at(int k, int m) const {
    return v[static_cast<std::size_t>(m) * (K + 1) - static_cast<std::size_t>(m) * (m - 1) / 2 + (k - m)];
  }
  double& slot(int k, int m) {
    return v[static_cast<std::size_t>(m) * (K + 1) - static_cast<std::size_t>(m) * (m - 1) / 2 + (k - m)];
  }
};

inline LegendreBlock legendre_block(int K, double x) {
  if (K > legendre_degree_cap)
    throw precondition_error("legendre_block: degree beyond stability cap 200");
  LegendreBlock b;
  b.K = K;
  b.v.resize(static_cast<std::size_t>(K + 1) * (K + 2) / 2);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double nmm = 1.0;  // N_m^m
  for (int m = 0; m <= K; ++m) {
    if (m > 0) nmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    b.slot(m, m) = nmm;
    if (m + 1 <= K) b.slot(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * nmm;
    for (int k = m + 2; k <= K; ++k) {
      const double a = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - static_cast<double>(m) * m));
      const double c = std::sqrt(((static_cast<double>(k - 1) * (k - 1)) - static_cast<double>(m) * m) /
                                 (4.0 * static_cast<double>(k - 1) * (k - 1) - 1.0));
      b.slot(k, m) = a * (x * b.at(k - 1, m) - c * b.at(k - 2, m));
    }
  }
  return b;
}

// All Y_k^i(p) for k <= K, flat layout with degree k starting at offset k^2.
struct SphBlock {
  int K = 0;
  std::vector<double> v;
  double at(int k, int i) const { return v[static_cast<std::size_t>(k) * k + (i - 1)]; }
};

inline SphBlock sph_block(int K, const Vec3& p) {
  SphBlock out;
  out.K = K;
  out.v.resize(static_cast<std::size_t>(K + 1) * (K + 1));
  const LegendreBlock leg = legendre_block(K, p.z());
  const double phi = std::atan2(p.y(), p.x());
  // cos(m phi), sin(m phi) by angle addition.
  std::vector<double> cm(K + 1), sm(K + 1);
  cm[0] = 1.0;
  sm[0] = 0.0;
  const double c1 = std::cos(phi), s1 = std::sin(phi);
  for (int m = 1; m <= K; ++m) {
    cm[m] = cm[m - 1] * c1 - sm[m - 1] * s1;
    sm[m] = sm[m - 1] * c1 + cm[m - 1] * s1;
  }
  const double r2 = std::sqrt(2.0);
  for (int k = 0; k <= K; ++k) {
    double* row = out.v.data() + static_cast<std::size_t>(k) * k;
    row[k] = leg.at(k, 0);  // m = 0 at slot i = k+1
    for (int m = 1; m <= k; ++m) {
      const double n = r2 * leg.at(k, m);
      row[k + m] = n * cm[m];  // i = k+1+m
      row[k - m] = n * sm[m];  // i = k+1-m
    }
  }
  return out;
}

inline double eval_sph_harmonic(int k, int i, const Vec3& p) {
  if (i < 1 || i > 2 * k + 1) throw precondition_error("eval_sph_harmonic: slot out of range");
  return sph_block(k, p).at(k, i);
}

// ---------------------------------------------------------------------------
// Real rotation matrices per degree, by the recursion of Ivanic and
// Ruedenberg (J. Phys. Chem. 100 (1996) 6342, with the published erratum).
// delta[k] satisfies Y_k(R x) = delta[k] Y_k(x) componentwise; entries are
// indexed by classical orders and stored with offset m + k.

namespace detail {

struct ShRotation {
  std::vector<Eigen::MatrixXd> d;  // d[k] is (2k+1) x (2k+1)

  // Building block of the recursion: row index a lives in degree k-1,
  // column index b may touch the boundary orders +-k.
  double P(int i, int k, int a, int b) const {
    const Eigen::MatrixXd& r1 = d[1];
    const Eigen::MatrixXd& prev = d[k - 1];
    const int o1 = 1, o = k - 1;
    if (std::abs(b) < k) return r1(i + o1, 0 + o1) * prev(a + o, b + o);
    if (b == k)
      return r1(i + o1, 1 + o1) * prev(a + o, k - 1 + o) -
             r1(i + o1, -1 + o1) * prev(a + o, -k + 1 + o);
    return r1(i + o1, 1 + o1) * prev(a + o, -k + 1 + o) +
           r1(i + o1, -1 + o1) * prev(a + o, k - 1 + o);
  }
};

}  // namespace detail

inline std::vector<Eigen::MatrixXd> sh_rotation_matrices(int K, const Mat3& R) {
  if (K > wigner_degree_cap)
    throw precondition_error("sh_rotation_matrices: degree beyond stability cap 128");
  detail::ShRotation s;
  s.d.resize(K + 1);
  s.d[0] = Eigen::MatrixXd::Ones(1, 1);
  if (K == 0) return std::move(s.d);
  // Degree 1 in order (m = -1, 0, 1) ~ axes (y, z, x).
  Eigen::MatrixXd d1(3, 3);
  d1 << R(1, 1), R(1, 2), R(1, 0),
        R(2, 1), R(2, 2), R(2, 0),
        R(0, 1), R(0, 2), R(0, 0);
  s.d[1] = d1;
  for (int k = 2; k <= K; ++k) {
    Eigen::MatrixXd mat(2 * k + 1, 2 * k + 1);
    const int o = k;
    for (int m = -k; m <= k; ++m) {
      const int am = std::abs(m);
      for (int n = -k; n <= k; ++n) {
        const double denom = (std::abs(n) < k)
                                 ? static_cast<double>((k + n) * (k - n))
                                 : static_cast<double>(2 * k * (2 * k - 1));
        const double u = std::sqrt(static_cast<double>((k + m) * (k - m)) / denom);
        const double v = 0.5 * std::sqrt((1.0 + (m == 0 ? 1.0 : 0.0)) *
                                         static_cast<double>(k + am - 1) * (k + am) / denom) *
                         (m == 0 ? -1.0 : 1.0);
        const double w = (m == 0) ? 0.0
                                  : -0.5 * std::sqrt(static_cast<double>((k - am - 1) * (k - am)) / denom);
        double acc = 0.0;
        if (u != 0.0) acc += u * s.P(0, k, m, n);
        if (v != 0.0) {
          double V;
          if (m == 0) {
            V = s.P(1, k, 1, n) + s.P(-1, k, -1, n);
          } else if (m > 0) {
            V = s.P(1, k, m - 1, n) * std::sqrt(1.0 + (m == 1 ? 1.0 : 0.0)) -
                s.P(-1, k, -m + 1, n) * (m == 1 ? 0.0 : 1.0);
          } else {
            V = s.P(1, k, m + 1, n) * (m == -1 ? 0.0 : 1.0) +
                s.P(-1, k, -m - 1, n) * std::sqrt(1.0 + (m == -1 ? 1.0 : 0.0));
          }
          acc += v * V;
        }
        if (w != 0.0) {
          double W;
          if (m > 0)
            W = s.P(1, k, m + 1, n) + s.P(-1, k, -m - 1, n);
          else
            W = s.P(1, k, m - 1, n) - s.P(-1, k, -m + 1, n);
          acc += w * W;
        }
        mat(m + o, n + o) = acc;
      }
    }
    s.d[k] = std::move(mat);
  }
  return std::move(s.d);
}

// Matrices D^{(k)}(g) for k <= K (see header comment). Rotating the argument
// by g^{-1} is the same as rotating the frame by R_g^T, hence the transpose.
inline std::vector<Eigen::MatrixXd> wigner_matrices(int K, const RotationPoint& g) {
  std::vector<Eigen::MatrixXd> d = sh_rotation_matrices(K, g.matrix());
  for (auto& m : d) m.transposeInPlace();
  return d;
}

// Single entry T_k^{ij}(g) = <T(g) Y_k^i, Y_k^j>; slots i, j in 1..2k+1.
inline double eval_wigner(int k, int i, int j, const RotationPoint& g) {
  if (i < 1 || i > 2 * k + 1 || j < 1 || j > 2 * k + 1)
    throw precondition_error("eval_wigner: slot out of range");
  return wigner_matrices(k, g)[k](i - 1, j - 1);
}

// Character of the degree-k representation: trace of D^{(k)}, a function of
// the rotation angle only.
inline double so3_character(int k, double angle) {
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  if (std::abs(s) < 1e-8) {
    // sin((2k+1)h)/sin(h) -> 2k+1 with a smooth quadratic correction.
    const double n = 2.0 * k + 1.0;
    return n - n * (n * n - 1.0) * h * h / 6.0;
  }
  return std::sin((2.0 * k + 1.0) * h) / s;
}

}  // namespace manirad
