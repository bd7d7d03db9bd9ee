#include <chrono>
#include <cstdio>
#include "manirad/geometry.hpp"

using namespace manirad;

static void report(Manifold m, double rho, bool sym, const char* tag) {
  auto t0 = std::chrono::steady_clock::now();
  Lattice L = generate_lattice(m, rho, sym, 11);
  auto t1 = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::printf("%-6s rho=%.2f sym=%d  N=%4zu  sep=%.4f (>=%.4f)  cov=%.4f  [%.0f ms]\n",
              tag, rho, sym, L.size(), L.cert.separation, rho / 2, L.cert.covering, ms);
}

int main() {
  report(Manifold::S2, 0.4, false, "S2");
  report(Manifold::S2, 0.2, false, "S2");
  report(Manifold::S2, 0.2, true, "S2");
  report(Manifold::S2, pi, false, "S2");
  report(Manifold::SO3, 0.6, false, "SO3");
  report(Manifold::S2xS2, 0.8, false, "S2xS2");

  // determinism
  Lattice a = generate_lattice(Manifold::S2, 0.3, true, 5);
  Lattice b = generate_lattice(Manifold::S2, 0.3, true, 5);
  bool same = a.size() == b.size();
  for (size_t i = 0; same && i < a.size(); ++i)
    same = std::get<Vec3>(a.pts[i]) == std::get<Vec3>(b.pts[i]);
  std::printf("determinism: %s\n", same ? "ok" : "FAIL");

  // dual circles on symmetric lattice
  auto circ = dual_circles(a);
  std::printf("dual circles: %zu from %zu points (%s)\n", circ.size(), a.size(),
              2 * circ.size() == a.size() ? "ok" : "FAIL");
  double orth = 0;
  for (const auto& c : circ)
    for (int t = 0; t < 8; ++t)
      orth = std::max(orth, std::fabs(c.pole.dot(c.point(t * 0.7853981633974483))));
  std::printf("circle orthogonality: %.2e\n", orth);

  // voronoi masses
  Lattice L = generate_lattice(Manifold::S2, 0.5, false, 2);
  QuadratureGrid q = s2_quadrature(60);
  VoronoiPartition vp = voronoi_partition(L, q);
  double tot = 0, mn = 1e9;
  for (double w : vp.mass) { tot += w; mn = std::min(mn, w); }
  std::printf("voronoi: total=%.15f min=%.2e\n", tot, mn);

  // verify_lattice on random points matches brute force
  Lattice R; R.manifold = Manifold::S2; R.rho = 1.0;
  Rng rng(9);
  for (int i = 0; i < 100; ++i) R.pts.emplace_back(rng.sphere_point());
  auto cert = verify_lattice(R, 20);
  double bsep = 1e9;
  for (size_t i = 0; i < R.pts.size(); ++i)
    for (size_t j = i + 1; j < R.pts.size(); ++j)
      bsep = std::min(bsep, geodesic_distance(R.pts[i], R.pts[j]));
  std::printf("verify sep: %.2e\n", std::fabs(cert.separation - bsep));
  return 0;
}
