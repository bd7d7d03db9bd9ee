#pragma once

// Product Gauss-Legendre / trapezoid grids. These are exact (to rounding)
// for band-limited integrands up to a stated degree and serve as the
// reference integrators: geometric transform oracles, Voronoi masses, and
// the moment side of cubature construction.

#include <vector>

#include "manirad/core.hpp"
#include "manirad/special.hpp"

namespace manirad {

struct QuadratureGrid {
  Manifold manifold = Manifold::S2;
  std::vector<Point> pts;
  std::vector<double> w;    // sums to 1 (probability measure)
  int max_degree = 0;       // exact for harmonic degree <= max_degree
  double exact_lambda = 0;  // the matching eigenvalue bound

  std::size_t size() const { return pts.size(); }
};

// Exact for all spherical polynomials of degree <= deg: Gauss in z times
// uniform trapezoid in phi (which integrates modes |m| <= n_phi - 1 exactly).
inline QuadratureGrid s2_quadrature(int deg) {
  QuadratureGrid q;
  q.manifold = Manifold::S2;
  q.max_degree = deg;
  q.exact_lambda = static_cast<double>(deg) * (deg + 1);
  const int nz = deg / 2 + 1;
  const int np = deg + 1;
  const GaussRule gl = gauss_legendre(nz);
  q.pts.reserve(static_cast<std::size_t>(nz) * np);
  q.w.reserve(static_cast<std::size_t>(nz) * np);
  for (int t = 0; t < nz; ++t) {
    const double z = gl.x[t];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double wt = gl.w[t] / 2.0 / np;
    for (int p = 0; p < np; ++p) {
      const double phi = 2.0 * pi * p / np;
      q.pts.emplace_back(Vec3(r * std::cos(phi), r * std::sin(phi), z));
      q.w.push_back(wt);
    }
  }
  return q;
}

// Exact for Wigner-coefficient combinations of degree <= deg. The alpha and
// gamma averages remove unmatched Fourier modes, after which the beta
// integrand is a polynomial of degree <= deg in cos(beta).
inline QuadratureGrid so3_quadrature(int deg) {
  QuadratureGrid q;
  q.manifold = Manifold::SO3;
  q.max_degree = deg;
  q.exact_lambda = static_cast<double>(deg) * (deg + 1);
  const int nb = deg / 2 + 1;
  const int na = deg + 1;
  const GaussRule gl = gauss_legendre(nb);
  for (int t = 0; t < nb; ++t) {
    const double beta = std::acos(gl.x[t]);
    const double wb = gl.w[t] / 2.0;
    for (int ia = 0; ia < na; ++ia)
      for (int ig = 0; ig < na; ++ig) {
        RotationPoint g;
        g.alpha = 2.0 * pi * ia / na;
        g.gamma = 2.0 * pi * ig / na;
        g.beta = beta;
        q.pts.emplace_back(g);
        q.w.push_back(wb / (static_cast<double>(na) * na));
      }
  }
  return q;
}

inline QuadratureGrid s2xs2_quadrature(int deg) {
  QuadratureGrid q;
  q.manifold = Manifold::S2xS2;
  q.max_degree = deg;
  q.exact_lambda = static_cast<double>(deg) * (deg + 1);
  const QuadratureGrid s = s2_quadrature(deg);
  q.pts.reserve(s.size() * s.size());
  q.w.reserve(s.size() * s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      ProductPoint p;
      p.a = std::get<Vec3>(s.pts[i]);
      p.b = std::get<Vec3>(s.pts[j]);
      q.pts.emplace_back(p);
      q.w.push_back(s.w[i] * s.w[j]);
    }
  return q;
}

inline QuadratureGrid make_quadrature(Manifold m, int deg) {
  switch (m) {
    case Manifold::S2: return s2_quadrature(deg);
    case Manifold::SO3: return so3_quadrature(deg);
    case Manifold::S2xS2: return s2xs2_quadrature(deg);
  }
  throw precondition_error("make_quadrature: bad manifold");
}

// Smallest grid whose certificate covers E_lambda. The product-manifold
// certificate is scalar (worst case concentrates all of lambda in one
// factor), so the returned grid can be finer than strictly necessary there.
inline QuadratureGrid quadrature_for_lambda(Manifold m, double lambda) {
  int deg = 0;
  while (static_cast<double>(deg) * (deg + 1) + bandwidth_slack < lambda) ++deg;
  return make_quadrature(m, deg);
}

}  // namespace manirad
