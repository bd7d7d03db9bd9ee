#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/harmonics.hpp"
#include "manirad/quadrature.hpp"
#include "manirad/special.hpp"

using namespace manirad;

TEST_CASE("legendre recurrence matches closed-form low-degree values",
          "[harmonics]") {
  // oracle: explicit polynomials
  const double xs[] = {-0.9, -0.3, 0.0, 0.25, 0.7, 1.0};
  for (const double x : xs) {
    const auto p = legendre_all(6, x);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == x);
    CHECK(p[2] == Catch::Approx(0.5 * (3 * x * x - 1)).margin(1e-15));
    CHECK(p[3] == Catch::Approx(0.5 * (5 * x * x * x - 3 * x)).margin(1e-15));
    CHECK(p[4] ==
          Catch::Approx((35 * std::pow(x, 4) - 30 * x * x + 3) / 8).margin(1e-14));
  }
  // P_k(1) = 1 exactly, and P_k(0) vanishes for odd k
  const auto at1 = legendre_all(20, 1.0);
  const auto at0 = legendre_all(20, 0.0);
  for (int k = 0; k <= 20; ++k) {
    CHECK(at1[k] == Catch::Approx(1.0).margin(1e-14));
    if (k % 2 == 1) CHECK(at0[k] == 0.0);
  }
  CHECK(at0[2] == Catch::Approx(-0.5).margin(1e-15));
  CHECK(at0[4] == Catch::Approx(0.375).margin(1e-15));
}

TEST_CASE("spherical harmonics are orthonormal under the probability measure",
          "[harmonics]") {
  const int K = 8;
  const QuadratureGrid q = s2_quadrature(2 * K);
  // gram matrix of all (k, i) pairs against the quadrature oracle
  const int n = (K + 1) * (K + 1);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < q.size(); ++s) {
    const SphBlock b = sph_block(K, std::get<Vec3>(q.pts[s]));
    Eigen::Map<const Eigen::VectorXd> v(b.v.data(), n);
    G += q.w[s] * (v * v.transpose());
  }
  G -= Eigen::MatrixXd::Identity(n, n);
  CHECK(G.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("addition theorem ties the basis to legendre polynomials",
          "[harmonics]") {
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const Vec3 x = rng.sphere_point();
    const Vec3 y = rng.sphere_point();
    const SphBlock bx = sph_block(12, x);
    const SphBlock by = sph_block(12, y);
    const auto p = legendre_all(12, x.dot(y));
    for (int k = 0; k <= 12; ++k) {
      double s = 0.0;
      for (int i = 1; i <= 2 * k + 1; ++i) s += bx.at(k, i) * by.at(k, i);
      CHECK(s == Catch::Approx((2 * k + 1) * p[k]).margin(1e-11));
    }
  }
}

TEST_CASE("point evaluation helper agrees with the block evaluator",
          "[harmonics]") {
  Rng rng(42);
  const Vec3 x = rng.sphere_point();
  const SphBlock b = sph_block(6, x);
  for (int k = 0; k <= 6; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i)
      CHECK(eval_sph_harmonic(k, i, x) == Catch::Approx(b.at(k, i)).margin(1e-14));
}

TEST_CASE("rotation group basis is orthonormal and rotations act correctly",
          "[harmonics]") {
  const int K = 3;
  const QuadratureGrid q = so3_quadrature(2 * K);
  // W_k^{ij} = sqrt(2k+1) D_k^{ji}: orthonormal under the probability measure
  std::size_t nslots = 0;
  for (int k = 0; k <= K; ++k) nslots += std::size_t(2 * k + 1) * (2 * k + 1);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nslots),
                                            static_cast<Eigen::Index>(nslots));
  for (std::size_t s = 0; s < q.size(); ++s) {
    const auto d = wigner_matrices(K, std::get<RotationPoint>(q.pts[s]));
    Eigen::VectorXd v(static_cast<Eigen::Index>(nslots));
    Eigen::Index at = 0;
    for (int k = 0; k <= K; ++k) {
      const double scale = std::sqrt(2.0 * k + 1.0);
      for (int i = 0; i < 2 * k + 1; ++i)
        for (int j = 0; j < 2 * k + 1; ++j) v[at++] = scale * d[k](j, i);
    }
    G += q.w[s] * (v * v.transpose());
  }
  G -= Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nslots),
                                 static_cast<Eigen::Index>(nslots));
  CHECK(G.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wigner matrices represent the group operation", "[harmonics]") {
  Rng rng(43);
  const RotationPoint g1 = rng.rotation_point();
  const RotationPoint g2 = rng.rotation_point();
  const RotationPoint g12 = RotationPoint::from_matrix(g1.matrix() * g2.matrix());
  const auto d1 = wigner_matrices(4, g1);
  const auto d2 = wigner_matrices(4, g2);
  const auto d12 = wigner_matrices(4, g12);
  for (int k = 0; k <= 4; ++k)
    CHECK((d1[k] * d2[k] - d12[k]).cwiseAbs().maxCoeff() < 1e-12);

  // the degree-1 representation is the rotation itself in a fixed conjugation
  const auto id = wigner_matrices(2, RotationPoint{});
  for (int k = 0; k <= 2; ++k)
    CHECK((id[k] - Eigen::MatrixXd::Identity(2 * k + 1, 2 * k + 1))
              .cwiseAbs()
              .maxCoeff() < 1e-13);
}

TEST_CASE("rotating the argument equals applying the representation",
          "[harmonics]") {
  Rng rng(44);
  const RotationPoint g = rng.rotation_point();
  const Mat3 R = g.matrix();
  const auto D = sh_rotation_matrices(5, R);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec3 x = rng.sphere_point();
    const SphBlock brx = sph_block(5, R * x);
    const SphBlock bx = sph_block(5, x);
    for (int k = 0; k <= 5; ++k) {
      Eigen::VectorXd vx(2 * k + 1), vrx(2 * k + 1);
      for (int i = 1; i <= 2 * k + 1; ++i) {
        vx[i - 1] = bx.at(k, i);
        vrx[i - 1] = brx.at(k, i);
      }
      CHECK((D[k] * vx - vrx).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("so3 characters sum the diagonal of the representation",
          "[harmonics]") {
  Rng rng(45);
  const RotationPoint g = rng.rotation_point();
  const auto d = wigner_matrices(6, g);
  // rotation angle from the matrix trace
  const double tr = g.matrix().trace();
  const double angle = std::acos(std::min(1.0, std::max(-1.0, (tr - 1.0) / 2.0)));
  for (int k = 0; k <= 6; ++k)
    CHECK(so3_character(k, angle) == Catch::Approx(d[k].trace()).margin(1e-10));
}
