#pragma once

// Metric rho-lattices: finite point families whose balls B(x, rho/4) are
// pairwise disjoint (min pairwise distance >= rho/2) while balls B(x, rho/2)
// cover the manifold. Covering is certified against a deterministic probe
// grid, not exactly; the certificate records the probe spacing used.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "manirad/core.hpp"
#include "manirad/quadrature.hpp"

namespace manirad {

struct LatticeCertificate {
  double separation = 0.0;     // exact min pairwise geodesic distance
  double covering = 0.0;       // max over probe points of dist to lattice
  double probe_spacing = 0.0;  // nominal spacing of the probe grid
};

struct Lattice {
  Manifold manifold = Manifold::S2;
  double rho = 0.0;
  bool symmetric = false;
  std::vector<Point> pts;
  LatticeCertificate cert;

  std::size_t size() const { return pts.size(); }
};

// ---------------------------------------------------------------------------
// Probe grids. Deterministic, quasi-uniform, nominal spacing h.

inline std::vector<Vec3> s2_probe_vectors(double h) {
  std::vector<Vec3> out;
  const int nt = std::max(2, static_cast<int>(std::ceil(pi / h)));
  for (int r = 0; r < nt; ++r) {
    const double theta = (r + 0.5) * pi / nt;
    const double st = std::sin(theta), ct = std::cos(theta);
    const int np = std::max(4, static_cast<int>(std::ceil(2.0 * pi * st / h)));
    for (int c = 0; c < np; ++c) {
      const double phi = (c + 0.5 * (r % 2)) * 2.0 * pi / np;
      out.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
    }
  }
  return out;
}

inline std::vector<Point> probe_grid(Manifold m, double h) {
  std::vector<Point> out;
  if (m == Manifold::S2) {
    for (const Vec3& v : s2_probe_vectors(h)) out.emplace_back(v);
    return out;
  }
  if (m == Manifold::SO3) {
    const int nb = std::max(2, static_cast<int>(std::ceil(pi / h)));
    const int na = std::max(4, static_cast<int>(std::ceil(2.0 * pi / h)));
    for (int b = 0; b < nb; ++b) {
      const double beta = (b + 0.5) * pi / nb;
      for (int a = 0; a < na; ++a)
        for (int g = 0; g < na; ++g)
          out.emplace_back(RotationPoint{(a + 0.5 * (b % 2)) * 2.0 * pi / na, beta,
                                         (g + 0.5 * (a % 2)) * 2.0 * pi / na});
    }
    return out;
  }
  const std::vector<Vec3> f = s2_probe_vectors(h / std::sqrt(2.0));
  out.reserve(f.size() * f.size());
  for (const Vec3& a : f)
    for (const Vec3& b : f) out.emplace_back(ProductPoint{a, b});
  return out;
}

// ---------------------------------------------------------------------------

inline std::size_t nearest_index(const std::vector<Point>& pts, const Point& p,
                                 double* dist_out = nullptr) {
  std::size_t best = 0;
  double bd = geodesic_distance(pts[0], p);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = geodesic_distance(pts[i], p);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  if (dist_out) *dist_out = bd;
  return best;
}

// Exact pairwise separation plus grid-certified covering radius.
// grid_density is probe points per unit length (spacing 1/density).
inline LatticeCertificate verify_lattice(Lattice& L, int grid_density) {
  if (grid_density < 1) throw precondition_error("verify_lattice: density must be >= 1");
  LatticeCertificate c;
  c.probe_spacing = 1.0 / grid_density;
  const PointCloud lat(L.manifold, L.pts);
  c.separation = 2.0 * pi;
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (std::size_t j = i + 1; j < lat.size(); ++j)
      c.separation = std::min(c.separation, lat.distance(i, j));

  const PointCloud probes(L.manifold, probe_grid(L.manifold, c.probe_spacing));
  std::vector<double> dist(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    double d;
    lat.nearest(probes, i, &d);
    dist[i] = d;
  });
  c.covering = *std::max_element(dist.begin(), dist.end());
  L.cert = c;
  return c;
}

namespace detail {

// Rakhmanov-Saff-Zhou style spiral; quasi-uniform for any n.
inline std::vector<Vec3> spiral_template(int n) {
  std::vector<Vec3> out;
  out.reserve(n);
  double phi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = (n == 1) ? 1.0 : -1.0 + 2.0 * i / (n - 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    if (i > 0 && i + 1 < n) phi += 3.6 / (std::sqrt(static_cast<double>(n)) * st);
    out.emplace_back(st * std::cos(phi), st * std::sin(phi), z);
  }
  return out;
}

inline std::vector<Point> lattice_template(Manifold m, double rho, Rng& rng) {
  std::vector<Point> out;
  if (m == Manifold::S2) {
    const int n = std::max(6, static_cast<int>(std::ceil(22.0 / (rho * rho))));
    const Mat3 R = rng.rotation_point().matrix();
    for (const Vec3& v : spiral_template(n)) out.emplace_back(Vec3(R * v));
  } else if (m == Manifold::SO3) {
    // Euler tensor grid with beta-stretched gamma rings: near beta = 0 (and
    // pi) a full alpha ring at a single gamma already sweeps the surviving
    // angle alpha +/- gamma, so ring sizes follow sin(beta) down to a floor.
    // Thinning and insertion certify the result either way.
    const double h = 0.8 * rho;
    const int nb = std::max(2, static_cast<int>(std::ceil(pi / h)));
    const int na = std::max(3, static_cast<int>(std::ceil(2.0 * pi / h)));
    const double oa = rng.uniform() * 2.0 * pi, og = rng.uniform() * 2.0 * pi;
    for (int b = 0; b < nb; ++b) {
      const double beta = (b + 0.5) * pi / nb;
      const int ng = std::max(
          3, static_cast<int>(std::ceil(na * std::max(std::sin(beta), 0.25))));
      for (int a = 0; a < na; ++a)
        for (int g = 0; g < ng; ++g)
          out.emplace_back(RotationPoint{std::fmod(oa + a * 2.0 * pi / na, 2.0 * pi), beta,
                                         std::fmod(og + (g + 0.5 * (a % 2)) * 2.0 * pi / ng,
                                                   2.0 * pi)});
    }
  } else {
    throw precondition_error("lattice_template: product manifold has its own path");
  }
  return out;
}

inline Point antipode(const Point& p) { return Point(Vec3(-std::get<Vec3>(p))); }

// Product lattice. Every candidate (template or probe) is a pair drawn from
// two small factor vocabularies, so squared product distances split into two
// table lookups; the covering fill and insert updates then cost adds instead
// of arc cosines. Same template / thin / insert scheme as the generic path.
inline Lattice generate_s2xs2_lattice(double rho, std::uint64_t seed) {
  Lattice L;
  L.manifold = Manifold::S2xS2;
  L.rho = rho;
  Rng rng(seed);
  const double sep = rho / 2.0, sep2 = sep * sep;

  // factor templates at rho / sqrt(2) and probe factor list at (rho/3)/sqrt(2)
  const int n = std::max(6, static_cast<int>(std::ceil(44.0 / (rho * rho))));
  const Mat3 Ra = rng.rotation_point().matrix();
  const Mat3 Rb = rng.rotation_point().matrix();
  const std::vector<Vec3> spiral = spiral_template(n);
  const std::vector<Vec3> probes = s2_probe_vectors(rho / 3.0 / std::sqrt(2.0));
  const int F = static_cast<int>(probes.size());

  // vocabularies: indices [0, n) template factors, [n, n + F) probe factors
  std::vector<Vec3> va(n + F), vb(n + F);
  for (int i = 0; i < n; ++i) {
    va[i] = Ra * spiral[i];
    vb[i] = Rb * spiral[i];
  }
  for (int i = 0; i < F; ++i) va[n + i] = vb[n + i] = probes[i];
  Eigen::MatrixXd Ta(n + F, n + F), Tb(n + F, n + F);
  parallel_for(static_cast<std::size_t>(n + F), [&](std::size_t i) {
    for (int j = 0; j <= static_cast<int>(i); ++j) {
      const double da = s2_distance(va[i], va[j]);
      const double db = s2_distance(vb[i], vb[j]);
      Ta(i, j) = Ta(j, i) = da * da;
      Tb(i, j) = Tb(j, i) = db * db;
    }
  });

  std::vector<std::pair<int, int>> idx;  // (a-vocab, b-vocab) per point
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool ok = true;
      for (const auto& [ka, kb] : idx)
        if (Ta(i, ka) + Tb(j, kb) < sep2) {
          ok = false;
          break;
        }
      if (ok) idx.emplace_back(i, j);
    }

  Eigen::MatrixXd dist2 =
      Eigen::MatrixXd::Constant(F, F, 4.0 * pi * pi);  // probe (p, q) to family
  parallel_for(static_cast<std::size_t>(F), [&](std::size_t p) {
    for (int q = 0; q < F; ++q) {
      double m = dist2(p, q);
      for (const auto& [ka, kb] : idx)
        m = std::min(m, Ta(n + p, ka) + Tb(n + q, kb));
      dist2(p, q) = m;
    }
  });

  const std::size_t max_inserts = 4 * static_cast<std::size_t>(F) * F + 64;
  std::size_t inserts = 0;
  for (;;) {
    int bp = 0, bq = 0;
    const double worst = dist2.maxCoeff(&bp, &bq);
    if (worst <= sep2) break;
    if (++inserts > max_inserts)
      throw certification_error("generate_lattice: covering stalled at radius " +
                                std::to_string(std::sqrt(worst)));
    idx.emplace_back(n + bp, n + bq);
    dist2 = dist2.cwiseMin(Ta.col(n + bp).segment(n, F).replicate(1, F) +
                           Tb.col(n + bq).segment(n, F).transpose().replicate(F, 1));
  }

  L.pts.reserve(idx.size());
  for (const auto& [ka, kb] : idx) L.pts.emplace_back(ProductPoint{va[ka], vb[kb]});
  double sep2min = 4.0 * pi * pi;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      sep2min = std::min(sep2min, Ta(idx[i].first, idx[j].first) +
                                      Tb(idx[i].second, idx[j].second));
  L.cert.separation = std::sqrt(sep2min);
  L.cert.covering = std::sqrt(dist2.maxCoeff());
  L.cert.probe_spacing = rho / 3.0;
  if (L.cert.separation < sep || L.cert.covering > sep)
    throw certification_error("generate_lattice: certificate failed");
  return L;
}

}  // namespace detail

// Template, then greedy thinning to restore separation, then greedy insertion
// at the worst-covered probe point until the probe covering radius drops to
// rho/2. Inserted points are themselves probe points at distance > rho/2 from
// the current family, so separation survives insertion. Symmetric families
// insert antipodal pairs, which preserves both properties by symmetry.
inline Lattice generate_lattice(Manifold m, double rho, bool symmetric,
                                std::uint64_t seed) {
  if (!(rho > 1e-4)) throw precondition_error("generate_lattice: rho too small");
  if (!(rho <= 2.0 * pi)) throw precondition_error("generate_lattice: rho too large");
  if (symmetric && m != Manifold::S2)
    throw precondition_error("generate_lattice: symmetric lattices are S2 only");
  if (m == Manifold::S2xS2) return detail::generate_s2xs2_lattice(rho, seed);

  Lattice L;
  L.manifold = m;
  L.rho = rho;
  L.symmetric = symmetric;
  Rng rng(seed);
  const double sep = rho / 2.0;

  std::vector<Point> tmpl = detail::lattice_template(m, rho, rng);
  if (symmetric) {
    // hemisphere representatives; each accepted point brings its antipode
    std::vector<Point> half;
    for (const Point& p : tmpl) {
      const Vec3& v = std::get<Vec3>(p);
      if (v.z() > 0.0 || (v.z() == 0.0 && v.x() > 0.0)) half.push_back(p);
    }
    tmpl = std::move(half);
  }

  PointCloud lat(m);
  auto push = [&](const Point& p) {
    L.pts.push_back(p);
    lat.push(p);
  };
  const PointCloud tc(m, tmpl);
  auto admissible = [&](const Point& p) {
    const PointCloud one(m, {p});
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (lat.distance(i, one, 0) < sep) return false;
    return true;
  };
  for (std::size_t t = 0; t < tmpl.size(); ++t) {
    bool ok = true;
    for (std::size_t i = 0; i < lat.size() && ok; ++i)
      ok = lat.distance(i, tc, t) >= sep;
    if (!ok) continue;
    if (symmetric && !admissible(detail::antipode(tmpl[t]))) continue;
    push(tmpl[t]);
    if (symmetric) push(detail::antipode(tmpl[t]));
  }
  if (L.pts.empty()) {
    push(tmpl.empty() ? Point(Vec3(0, 0, 1)) : tmpl.front());
    if (symmetric) push(detail::antipode(L.pts.front()));
  }

  const double h = rho / 4.0;
  const std::vector<Point> probe_pts = probe_grid(m, h);
  const PointCloud probes(m, probe_pts);
  std::vector<double> dist(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    double d;
    lat.nearest(probes, i, &d);
    dist[i] = d;
  });
  auto add_point = [&](const Point& p) {
    push(p);
    const std::size_t last = lat.size() - 1;
    parallel_for(probes.size(), [&](std::size_t i) {
      dist[i] = std::min(dist[i], lat.distance(last, probes, i));
    });
  };

  const std::size_t max_inserts = 4 * probes.size() + 64;
  std::size_t inserts = 0;
  for (;;) {
    const std::size_t worst =
        std::max_element(dist.begin(), dist.end()) - dist.begin();
    if (dist[worst] <= sep) break;
    if (++inserts > max_inserts)
      throw certification_error("generate_lattice: covering stalled at radius " +
                                std::to_string(dist[worst]));
    add_point(probe_pts[worst]);
    if (symmetric) add_point(detail::antipode(probe_pts[worst]));
  }

  L.cert.separation = 2.0 * pi;
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (std::size_t j = i + 1; j < lat.size(); ++j)
      L.cert.separation = std::min(L.cert.separation, lat.distance(i, j));
  L.cert.covering = *std::max_element(dist.begin(), dist.end());
  L.cert.probe_spacing = h;
  if (L.cert.separation < sep || L.cert.covering > sep)
    throw certification_error("generate_lattice: certificate failed");
  return L;
}

// ---------------------------------------------------------------------------
// Great circles. u(phi) = cos(phi) e1 + sin(phi) e2 sweeps the circle whose
// plane is orthogonal to the pole.

struct GreatCircle {
  Vec3 pole, e1, e2;

  Vec3 point(double phi) const { return std::cos(phi) * e1 + std::sin(phi) * e2; }
};

inline GreatCircle great_circle(const Vec3& pole_in) {
  GreatCircle c;
  c.pole = pole_in.normalized();
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::fabs(c.pole[a]) < std::fabs(c.pole[axis])) axis = a;
  Vec3 e = Vec3::Zero();
  e[axis] = 1.0;
  c.e1 = c.pole.cross(e).normalized();
  c.e2 = c.pole.cross(c.e1);
  return c;
}

// One circle per antipodal pair; the pole of circle r is the first-listed
// member of pair r in lattice order.
inline std::vector<GreatCircle> dual_circles(const Lattice& L) {
  if (L.manifold != Manifold::S2 || !L.symmetric)
    throw precondition_error("dual_circles: need a symmetric S2 lattice");
  std::vector<GreatCircle> out;
  std::vector<bool> used(L.pts.size(), false);
  for (std::size_t i = 0; i < L.pts.size(); ++i) {
    if (used[i]) continue;
    const Vec3 x = std::get<Vec3>(L.pts[i]);
    std::size_t partner = L.pts.size();
    for (std::size_t j = i + 1; j < L.pts.size(); ++j) {
      if (!used[j] && (std::get<Vec3>(L.pts[j]) + x).norm() < 1e-9) {
        partner = j;
        break;
      }
    }
    if (partner == L.pts.size())
      throw precondition_error("dual_circles: lattice is not antipodally closed");
    used[i] = used[partner] = true;
    out.push_back(great_circle(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nearest-neighbor partition of a weighted grid. owner[i] is the lattice
// index closest to grid point i (lowest index on ties); mass sums owner
// weights per lattice point.

struct VoronoiPartition {
  std::vector<int> owner;
  std::vector<double> mass;
};

inline VoronoiPartition voronoi_partition(const Lattice& L, const QuadratureGrid& grid) {
  if (grid.manifold != L.manifold)
    throw precondition_error("voronoi_partition: manifold mismatch");
  VoronoiPartition vp;
  vp.owner.resize(grid.size());
  vp.mass.assign(L.size(), 0.0);
  const PointCloud lat(L.manifold, L.pts);
  const PointCloud cells(L.manifold, grid.pts);
  parallel_for(grid.size(), [&](std::size_t i) {
    vp.owner[i] = static_cast<int>(lat.nearest(cells, i));
  });
  for (std::size_t i = 0; i < grid.size(); ++i) vp.mass[vp.owner[i]] += grid.w[i];
  return vp;
}

}  // namespace manirad
