#pragma once

// Radon-type transforms as spectral multipliers, plus direct quadrature
// evaluation of the same integrals for independent cross-checking.
//
// Conventions (everything is normalized to probability measures):
//   * Funk-Radon R: mean of f over the great circle orthogonal to the pole.
//     Degree-k action mu_k with mu_0 = 1; odd degrees are the kernel.
//   * Hemispherical T: integral of f over {x . xi > 0} against the global
//     normalized measure, so T1 = 1/2. Even degrees k >= 2 are the kernel;
//     inversion is defined on odd functions only and any k = 0 content is
//     rejected rather than guessed.
//   * SO(3) Radon: (Rf)(x, y) = mean of f over {g : gy = x}. Against the
//     matrix-coefficient family T_k^{ij} the action is kappa_k = 1/(2k+1);
//     between the orthonormal bases (W_k^{ij} here, Y x Y there) the factor
//     picks up sqrt(2k+1), landing on the diagonal (k, k) blocks of S2xS2.
//
// Absolute constants are pinned by the k = 0, 1 quadrature oracles; the
// log-Gamma formulas below then fix every ratio and stay finite to k = 200.

#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "manirad/geometry.hpp"
#include "manirad/spaces.hpp"
#include "manirad/special.hpp"

namespace manirad {

enum class TransformKind { FunkRadon, Hemispherical, SO3Radon };

struct MultiplierTable {
  TransformKind kind = TransformKind::FunkRadon;
  int n = 2;  // sphere dimension parameter (S^n); 2 everywhere in practice
  std::vector<double> entries;  // index = degree k

  double entry(int k) const {
    if (k < 0 || k >= static_cast<int>(entries.size()))
      throw precondition_error("multiplier table: degree " + std::to_string(k) +
                               " beyond table range");
    return entries[k];
  }
  std::set<int> kernel_degrees() const {
    std::set<int> z;
    for (int k = 0; k < static_cast<int>(entries.size()); ++k)
      if (entries[k] == 0.0) z.insert(k);
    return z;
  }
};

// mu_k = (-1)^{k/2} Gamma((k+1)/2) Gamma(n/2) / (Gamma((k+n)/2) Gamma(1/2))
// for even k (zero odd); equals the Legendre value P_k(0) when n = 2.
inline MultiplierTable funk_radon_multipliers(int kmax, int n = 2) {
  MultiplierTable t;
  t.kind = TransformKind::FunkRadon;
  t.n = n;
  t.entries.assign(kmax + 1, 0.0);
  for (int k = 0; k <= kmax; k += 2) {
    const double mag = std::exp(log_gamma((k + 1) / 2.0) - log_gamma((k + n) / 2.0) -
                                log_gamma(0.5) + log_gamma(n / 2.0));
    t.entries[k] = ((k / 2) % 2 == 0) ? mag : -mag;
  }
  return t;
}

// mu_0 = 1/2 (half mass); odd k: mu_k = (Gamma((n+1)/2) / (2 pi)) *
// (-1)^{(k-1)/2} Gamma(k/2) / Gamma((k+n+1)/2); even k >= 2 in the kernel.
// For n = 2 this gives mu_1 = 1/4, mu_3 = -1/16.
inline MultiplierTable hemispherical_multipliers(int kmax, int n = 2) {
  MultiplierTable t;
  t.kind = TransformKind::Hemispherical;
  t.n = n;
  t.entries.assign(kmax + 1, 0.0);
  t.entries[0] = 0.5;
  for (int k = 1; k <= kmax; k += 2) {
    const double mag = std::exp(log_gamma((n + 1) / 2.0) + log_gamma(k / 2.0) -
                                log_gamma((k + n + 1) / 2.0)) /
                       (2.0 * pi);
    t.entries[k] = (((k - 1) / 2) % 2 == 0) ? mag : -mag;
  }
  return t;
}

// kappa_k = 1/(2k+1): the action on matrix coefficients T_k^{ij}.
inline MultiplierTable so3_radon_multipliers(int kmax) {
  MultiplierTable t;
  t.kind = TransformKind::SO3Radon;
  t.n = 2;
  t.entries.resize(kmax + 1);
  for (int k = 0; k <= kmax; ++k) t.entries[k] = 1.0 / (2.0 * k + 1.0);
  return t;
}

// ---------------------------------------------------------------------------
// Multiplier actions on coefficient objects.

namespace detail {

inline HarmonicCoefficients s2_multiplier_apply(const HarmonicCoefficients& c,
                                                const MultiplierTable& t,
                                                bool inverse, const char* who) {
  if (c.manifold() != Manifold::S2) throw precondition_error(std::string(who) + ": S2 input required");
  HarmonicCoefficients out(Manifold::S2, c.omega());
  for (const auto& [key, blk] : c.blocks()) {
    const double mu = t.entry(key.first);
    if (mu == 0.0) {
      if (!inverse) continue;  // kernel degree annihilated
      throw precondition_error(std::string(who) + ": degree " +
                               std::to_string(key.first) + " is in the kernel");
    }
    out.block(key.first) = inverse ? Eigen::MatrixXd(blk / mu) : Eigen::MatrixXd(blk * mu);
  }
  return out;
}

inline void reject_kernel_content(const HarmonicCoefficients& c,
                                  const MultiplierTable& t, const char* who) {
  for (const auto& [key, blk] : c.blocks()) {
    if (t.entry(key.first) != 0.0) continue;
    const double m = blk.cwiseAbs().maxCoeff();
    if (m > 1e-12)
      throw precondition_error(std::string(who) + ": kernel-degree content " +
                               std::to_string(m) + " at degree " +
                               std::to_string(key.first));
  }
}

}  // namespace detail

inline HarmonicCoefficients funk_radon_forward(const HarmonicCoefficients& c) {
  const MultiplierTable t = funk_radon_multipliers(c.max_degree());
  return detail::s2_multiplier_apply(c, t, false, "funk_radon_forward");
}

inline HarmonicCoefficients funk_radon_inverse(const HarmonicCoefficients& c) {
  const MultiplierTable t = funk_radon_multipliers(c.max_degree());
  detail::reject_kernel_content(c, t, "funk_radon_inverse");
  HarmonicCoefficients even = c;
  even.prune(1e-12);  // drop the certified-negligible odd part before dividing
  return detail::s2_multiplier_apply(even, t, true, "funk_radon_inverse");
}

inline HarmonicCoefficients hemispherical_forward(const HarmonicCoefficients& c) {
  const MultiplierTable t = hemispherical_multipliers(c.max_degree());
  return detail::s2_multiplier_apply(c, t, false, "hemispherical_forward");
}

// Defined on odd functions; any k = 0 content is rejected, not inverted,
// since constants are indistinguishable from their own half-mass image only
// by convention.
inline HarmonicCoefficients hemispherical_inverse(const HarmonicCoefficients& c) {
  MultiplierTable t = hemispherical_multipliers(c.max_degree());
  t.entries[0] = 0.0;  // treat constants as kernel content for rejection
  detail::reject_kernel_content(c, t, "hemispherical_inverse");
  HarmonicCoefficients odd = c;
  odd.prune(1e-12);
  return detail::s2_multiplier_apply(odd, t, true, "hemispherical_inverse");
}

// Coefficient of W_k^{ij} lands on the (k, k) block of S2xS2 at slot (i, j),
// scaled by kappa_k sqrt(2k+1) = (2k+1)^{-1/2}. Output bandwidth doubles:
// lambda(k, k) = 2 lambda(k).
inline HarmonicCoefficients so3_radon_forward(const HarmonicCoefficients& c) {
  if (c.manifold() != Manifold::SO3)
    throw precondition_error("so3_radon_forward: SO(3) input required");
  const MultiplierTable t = so3_radon_multipliers(c.max_degree());
  HarmonicCoefficients out(Manifold::S2xS2, 2.0 * c.omega());
  for (const auto& [key, blk] : c.blocks()) {
    const int k = key.first;
    out.block(k, k) = blk * (t.entry(k) * std::sqrt(2.0 * k + 1.0));
  }
  return out;
}

inline HarmonicCoefficients so3_radon_inverse(const HarmonicCoefficients& c) {
  if (c.manifold() != Manifold::S2xS2)
    throw precondition_error("so3_radon_inverse: S2xS2 input required");
  for (const auto& [key, blk] : c.blocks())
    if (key.first != key.second && blk.cwiseAbs().maxCoeff() > 1e-12)
      throw precondition_error(
          "so3_radon_inverse: off-diagonal content at degree pair (" +
          std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
  const MultiplierTable t = so3_radon_multipliers(c.max_degree());
  HarmonicCoefficients out(Manifold::SO3, 0.5 * c.omega());
  for (const auto& [key, blk] : c.blocks()) {
    if (key.first != key.second) continue;
    const int k = key.first;
    out.block(k) = blk / (t.entry(k) * std::sqrt(2.0 * k + 1.0));
  }
  return out;
}

// Pf(x, y) = (Rf(x, y) + Rf(-x, y)) / 2: the odd-in-x (odd k) part of the
// Radon image drops, the even part passes through.
inline HarmonicCoefficients xray_crystallographic(const HarmonicCoefficients& c) {
  HarmonicCoefficients r = so3_radon_forward(c);
  HarmonicCoefficients out(Manifold::S2xS2, r.omega());
  for (const auto& [key, blk] : r.blocks())
    if (key.first % 2 == 0) out.block(key.first, key.second) = blk;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature oracles. Trapezoid rules on circles are spectrally accurate and
// integrate trigonometric polynomials of degree < q exactly, so for
// bandlimited f these are exact up to rounding.

inline double funk_radon_geometric(const std::function<double(const Vec3&)>& f,
                                   const GreatCircle& circle, int q) {
  if (q < 8) throw precondition_error("funk_radon_geometric: need q >= 8");
  double s = 0.0;
  for (int t = 0; t < q; ++t) s += f(circle.point(2.0 * pi * t / q));
  return s / q;
}

// Integral over {x . pole > 0} against the normalized sphere measure
// (half mass): Gauss in height above the pole plane times trapezoid rings.
inline double hemispherical_geometric(const std::function<double(const Vec3&)>& f,
                                      const Vec3& pole, int q) {
  if (q < 8) throw precondition_error("hemispherical_geometric: need q >= 8");
  const GreatCircle frame = great_circle(pole);
  const GaussRule gl = gauss_legendre(q);
  double s = 0.0;
  for (int a = 0; a < q; ++a) {
    const double z = 0.5 * (gl.x[a] + 1.0);  // height in (0, 1)
    const double wz = gl.w[a] * 0.5;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ring = 0.0;
    for (int t = 0; t < q; ++t) {
      const double phi = 2.0 * pi * t / q;
      ring += f(z * frame.pole + r * frame.point(phi));
    }
    s += wz * ring / q;
  }
  return 0.5 * s;  // hemisphere carries half the normalized mass
}

// Deterministic rotation taking e3 to x (columns e1, e2, x; right-handed).
inline Mat3 frame_taking_pole_to(const Vec3& x) {
  const GreatCircle c = great_circle(x);
  Mat3 m;
  m.col(0) = c.e1;
  m.col(1) = c.e2;
  m.col(2) = c.pole;
  return m;
}

// Mean of f over the circle {g : gy = x} = { U_x R_z(theta) U_y^T }.
inline double so3_radon_geometric(const std::function<double(const RotationPoint&)>& f,
                                  const Vec3& x, const Vec3& y, int q) {
  if (q < 8) throw precondition_error("so3_radon_geometric: need q >= 8");
  const Mat3 ux = frame_taking_pole_to(x);
  const Mat3 uy = frame_taking_pole_to(y);
  double s = 0.0;
  for (int t = 0; t < q; ++t) {
    const double th = 2.0 * pi * t / q;
    Mat3 rz;
    rz << std::cos(th), -std::sin(th), 0.0, std::sin(th), std::cos(th), 0.0, 0.0, 0.0, 1.0;
    s += f(RotationPoint::from_matrix(ux * rz * uy.transpose()));
  }
  return s / q;
}

}  // namespace manirad
