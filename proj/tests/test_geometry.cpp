#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/geometry.hpp"
#include "manirad/quadrature.hpp"

using namespace manirad;

TEST_CASE("distances satisfy the expected exact values", "[geometry]") {
  const Vec3 z = Vec3::UnitZ();
  CHECK(s2_distance(z, z) == 0.0);
  CHECK(s2_distance(z, Vec3(-z)) == Catch::Approx(pi).margin(1e-15));
  CHECK(s2_distance(z, Vec3::UnitX()) == Catch::Approx(pi / 2).margin(1e-15));
  // rotation by angle a about any axis sits at distance a from the identity
  for (const double a : {0.1, 1.0, 2.5}) {
    const RotationPoint g{0.0, a, 0.0};
    CHECK(so3_distance(RotationPoint{}, g) == Catch::Approx(a).margin(1e-12));
  }
  // product metric: sqrt of the sum of squared factor distances
  const ProductPoint p{z, Vec3::UnitX()};
  const ProductPoint q{Vec3::UnitX(), Vec3::UnitX()};
  CHECK(s2xs2_distance(p, q) == Catch::Approx(pi / 2).margin(1e-12));
}

TEST_CASE("euler angle round trip reproduces the rotation matrix",
          "[geometry]") {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const RotationPoint g = rng.rotation_point();
    const RotationPoint h = RotationPoint::from_matrix(g.matrix());
    CHECK((g.matrix() - h.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // degenerate rays: pure z-rotations and the half turn about x
  for (const double a : {0.0, 0.7, 3.9}) {
    Mat3 m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    const RotationPoint h = RotationPoint::from_matrix(m);
    CHECK((m - h.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lattice generation is deterministic in the seed", "[geometry]") {
  const Lattice a = generate_lattice(Manifold::S2, 0.3, false, 7);
  const Lattice b = generate_lattice(Manifold::S2, 0.3, false, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::get<Vec3>(a.pts[i]) == std::get<Vec3>(b.pts[i]));
  const Lattice c = generate_lattice(Manifold::S2, 0.3, false, 8);
  bool same = a.size() == c.size();
  if (same)
    for (std::size_t i = 0; i < a.size(); ++i)
      same = same && std::get<Vec3>(a.pts[i]) == std::get<Vec3>(c.pts[i]);
  CHECK_FALSE(same);
}

TEST_CASE("generated lattices carry a valid separation and covering certificate",
          "[geometry]") {
  for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
    const double rho = m == Manifold::S2 ? 0.3 : 0.6;
    const Lattice L = generate_lattice(m, rho, false, 5);
    INFO("manifold " << static_cast<int>(m) << " n " << L.size());
    CHECK(L.cert.separation >= rho / 2 - 1e-12);
    CHECK(L.cert.covering <= rho / 2 + 1e-12);
    // brute-force oracle for separation over all pairs
    double sep = 10.0;
    for (std::size_t i = 0; i < L.size(); ++i)
      for (std::size_t j = i + 1; j < L.size(); ++j)
        sep = std::min(sep, geodesic_distance(L.pts[i], L.pts[j]));
    CHECK(sep == Catch::Approx(L.cert.separation).margin(1e-14));
  }
}

TEST_CASE("independent verification agrees with the stored certificate",
          "[geometry]") {
  Lattice L = generate_lattice(Manifold::S2, 0.25, false, 9);
  const LatticeCertificate before = L.cert;
  const LatticeCertificate again = verify_lattice(L, 24);
  CHECK(again.separation == Catch::Approx(before.separation).margin(1e-14));
  // a different probe grid measures covering within one probe spacing
  CHECK(again.covering <= before.covering + again.probe_spacing);
  CHECK(again.covering >= before.covering - before.probe_spacing);
}

TEST_CASE("symmetric lattices are closed under the antipodal map",
          "[geometry]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.35, true, 3);
  REQUIRE(L.symmetric);
  REQUIRE(L.size() % 2 == 0);
  for (const Point& p : L.pts) {
    double d = 10.0;
    for (const Point& q : L.pts)
      d = std::min(d, (std::get<Vec3>(q) + std::get<Vec3>(p)).norm());
    CHECK(d < 1e-12);
  }
  // one circle per antipodal pair
  const auto circles = dual_circles(L);
  CHECK(circles.size() == L.size() / 2);
  const Lattice plain = generate_lattice(Manifold::S2, 0.35, false, 3);
  CHECK_THROWS_AS(dual_circles(plain), precondition_error);
}

TEST_CASE("great circle frames are orthonormal and sweep the right plane",
          "[geometry]") {
  Rng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec3 pole = rng.sphere_point() * 1.7;  // non-unit input is normalized
    const GreatCircle c = great_circle(pole);
    CHECK(c.pole.norm() == Catch::Approx(1.0).margin(1e-14));
    CHECK(c.e1.norm() == Catch::Approx(1.0).margin(1e-14));
    CHECK(c.e2.norm() == Catch::Approx(1.0).margin(1e-14));
    CHECK(std::abs(c.e1.dot(c.e2)) < 1e-14);
    CHECK(std::abs(c.e1.dot(c.pole)) < 1e-14);
    CHECK(std::abs(c.e2.dot(c.pole)) < 1e-14);
    for (const double phi : {0.0, 1.1, 4.0}) {
      const Vec3 u = c.point(phi);
      CHECK(u.norm() == Catch::Approx(1.0).margin(1e-14));
      CHECK(std::abs(u.dot(c.pole)) < 1e-14);
    }
  }
}

TEST_CASE("nearest neighbor search matches a brute force scan", "[geometry]") {
  Rng rng(63);
  const Lattice L = generate_lattice(Manifold::S2, 0.4, false, 11);
  for (int trial = 0; trial < 25; ++trial) {
    const Point p(rng.sphere_point());
    double dist = 0.0;
    const std::size_t got = nearest_index(L.pts, p, &dist);
    std::size_t want = 0;
    double wd = 10.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
      const double d = geodesic_distance(L.pts[i], p);
      if (d < wd) {
        wd = d;
        want = i;
      }
    }
    CHECK(got == want);
    CHECK(dist == Catch::Approx(wd).margin(1e-15));
  }
}

TEST_CASE("voronoi masses sum to one and owners are nearest", "[geometry]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.45, false, 13);
  const QuadratureGrid grid = s2_quadrature(24);
  const VoronoiPartition vp = voronoi_partition(L, grid);
  double total = 0.0;
  for (const double m : vp.mass) {
    CHECK(m > 0.0);  // covering radius below grid resolution: no empty cell
    total += m;
  }
  CHECK(total == Catch::Approx(1.0).margin(1e-13));
  for (std::size_t i = 0; i < grid.size(); i += 37) {
    const double down = geodesic_distance(L.pts[vp.owner[i]], grid.pts[i]);
    for (std::size_t j = 0; j < L.size(); ++j)
      CHECK(down <= geodesic_distance(L.pts[j], grid.pts[i]) + 1e-15);
  }
}

TEST_CASE("lattice cardinality scales like the inverse square of the spacing",
          "[geometry]") {
  const Lattice a = generate_lattice(Manifold::S2, 0.4, false, 21);
  const Lattice b = generate_lattice(Manifold::S2, 0.2, false, 21);
  const double ratio = static_cast<double>(b.size()) / a.size();
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}
