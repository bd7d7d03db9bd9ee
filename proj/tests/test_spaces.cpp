#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/quadrature.hpp"
#include "manirad/spaces.hpp"

using namespace manirad;

TEST_CASE("bandwidth to degree conversion respects the eigenvalue boundary",
          "[spaces]") {
  CHECK(max_degree_for(0.0) == 0);
  CHECK(max_degree_for(1.9) == 0);
  CHECK(max_degree_for(2.0) == 1);   // lambda(1) = 2 is included
  CHECK(max_degree_for(5.99) == 1);
  CHECK(max_degree_for(6.0) == 2);
  CHECK(max_degree_for(30.0) == 5);
  CHECK(max_degree_for(41.9) == 5);
  CHECK(max_degree_for(42.0) == 6);
}

TEST_CASE("slot dimension count matches the closed forms", "[spaces]") {
  for (const double omega : {0.0, 6.0, 20.0, 56.0}) {
    const std::uint64_t K = static_cast<std::uint64_t>(max_degree_for(omega));
    CHECK(weyl_dimension(Manifold::S2, omega) == (K + 1) * (K + 1));
    CHECK(weyl_dimension(Manifold::SO3, omega) ==
          (K + 1) * (2 * K + 1) * (2 * K + 3) / 3);
    for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2})
      CHECK(weyl_dimension(m, omega) == BasisSet::bandlimited(m, omega).size());
  }
}

TEST_CASE("coefficient norm is the L2 norm under the probability measure",
          "[spaces]") {
  Rng rng(51);
  for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
    const double omega = m == Manifold::SO3 ? 6.0 : 12.0;
    const HarmonicCoefficients c = random_coefficients(m, omega, rng);
    // oracle: numerical L2 norm on an exact product grid
    const QuadratureGrid q = make_quadrature(m, 2 * (c.max_degree() + 1));
    double l2 = 0.0;
    for (std::size_t s = 0; s < q.size(); ++s) {
      const double v = synthesize_at(c, q.pts[s]);
      l2 += q.w[s] * v * v;
    }
    CHECK(std::sqrt(l2) == Catch::Approx(c.norm()).epsilon(1e-11));
  }
}

TEST_CASE("analysis on an exact grid recovers the coefficients", "[spaces]") {
  Rng rng(52);
  for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
    const double omega = 6.0;
    const HarmonicCoefficients c = random_coefficients(m, omega, rng);
    const QuadratureGrid q =
        make_quadrature(m, 2 * max_degree_for(product_bandwidth(m, omega, omega)) + 1);
    const std::vector<double> samples = synthesize(c, q.pts);
    const HarmonicCoefficients back =
        analyze(m, q.pts, samples, q.w, omega, q.exact_lambda);
    const HarmonicCoefficients diff = linear_combination(1.0, c, -1.0, back);
    CHECK(diff.norm() < 1e-12 * (1.0 + c.norm()));
  }
}

TEST_CASE("pointwise synthesis agrees with the flat basis enumeration",
          "[spaces]") {
  Rng rng(53);
  for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
    const HarmonicCoefficients c = random_coefficients(m, 6.0, rng);
    const BasisSet bs = BasisSet::bandlimited(m, 6.0);
    const Eigen::VectorXd flat = bs.flatten(c);
    for (int trial = 0; trial < 3; ++trial) {
      Point p;
      if (m == Manifold::S2)
        p = rng.sphere_point();
      else if (m == Manifold::SO3)
        p = rng.rotation_point();
      else
        p = ProductPoint{rng.sphere_point(), rng.sphere_point()};
      const double direct = synthesize_at(c, p);
      const double viaflat = flat.dot(bs.evaluate_all(p));
      CHECK(direct == Catch::Approx(viaflat).margin(1e-12 * (1.0 + std::abs(direct))));
    }
    // unflatten inverts flatten
    const HarmonicCoefficients back = bs.unflatten(flat);
    CHECK(linear_combination(1.0, c, -1.0, back).norm() < 1e-14);
  }
}

TEST_CASE("smoothness norm applies the expected weight per degree", "[spaces]") {
  const double t = 1.5;
  // single unit slot: the norm is the weight to the power t/2
  {
    HarmonicCoefficients c(Manifold::S2, 30.0);
    c.set(4, 3, 1.0);
    const double lam = 4.0 * 5.0;
    CHECK(sobolev_norm(c, t) ==
          Catch::Approx(std::pow(1.0 + sobolev_scale(Manifold::S2) * lam, t / 2)));
    CHECK(sobolev_norm(c, t, 7.0) == Catch::Approx(std::pow(1.0 + 7.0 * lam, t / 2)));
    CHECK(sobolev_norm(c, 0.0) == Catch::Approx(1.0));
  }
  {
    HarmonicCoefficients c(Manifold::SO3, 6.0);
    c.set(2, 1, 4, 1.0);
    CHECK(sobolev_norm(c, t) ==
          Catch::Approx(std::pow(1.0 + sobolev_scale(Manifold::SO3) * 6.0, t / 2)));
  }
  {
    HarmonicCoefficients c(Manifold::S2xS2, 12.0);
    c.set(1, 2, 2, 3, 1.0);
    const double lam = 2.0 + 6.0;
    CHECK(sobolev_norm(c, t) ==
          Catch::Approx(std::pow(1.0 + sobolev_scale(Manifold::S2xS2) * lam, t / 2)));
  }
  // the inner product polarizes the norm
  Rng rng(54);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 20.0, rng);
  CHECK(sobolev_inner(f, f, t) == Catch::Approx(std::pow(sobolev_norm(f, t), 2)));
}

TEST_CASE("linear combinations merge blocks across different bandwidths",
          "[spaces]") {
  Rng rng(55);
  const HarmonicCoefficients x = random_coefficients(Manifold::S2, 6.0, rng);
  const HarmonicCoefficients y = random_coefficients(Manifold::S2, 20.0, rng);
  const HarmonicCoefficients z = linear_combination(2.0, x, -3.0, y);
  CHECK(z.omega() == 20.0);
  for (int k = 0; k <= 4; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i)
      CHECK(z.get(k, i) ==
            Catch::Approx(2.0 * x.get(k, i) - 3.0 * y.get(k, i)).margin(1e-15));
}

TEST_CASE("bandlimit projection drops exactly the high blocks", "[spaces]") {
  Rng rng(56);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 30.0, rng);
  const HarmonicCoefficients g = project_bandlimit(f, 6.0);
  CHECK(g.max_degree() == 2);
  for (int k = 0; k <= 2; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i) CHECK(g.get(k, i) == f.get(k, i));
  // energies split as a direct sum
  const double high = f.squared_norm() - g.squared_norm();
  double tail = 0.0;
  for (int k = 3; k <= 5; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i) tail += f.get(k, i) * f.get(k, i);
  CHECK(high == Catch::Approx(tail).epsilon(1e-12));
}

TEST_CASE("coefficient containers reject out-of-band and mismatched access",
          "[spaces]") {
  HarmonicCoefficients c(Manifold::S2, 6.0);
  CHECK_THROWS_AS(c.set(3, 1, 1.0), precondition_error);   // lambda = 12 > 6
  CHECK_THROWS_AS(c.set(1, 1, 1, 1.0), precondition_error); // wrong arity for S2
  CHECK_NOTHROW(c.set(2, 5, 1.0));
  HarmonicCoefficients p(Manifold::S2xS2, 6.0);
  CHECK_THROWS_AS(p.set(2, 1, 1, 1, 1.0), precondition_error);  // 6 + 2 > 6
  CHECK_NOTHROW(p.set(1, 1, 1, 3, 0.5));
  CHECK_THROWS_AS(HarmonicCoefficients(Manifold::S2, -1.0), precondition_error);
}
