#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/discretize.hpp"

using namespace manirad;

namespace {

// independent moment oracle: every nonconstant slot must integrate to zero
double worst_moment(const Cubature& C, double omega) {
  const BasisSet bs = BasisSet::bandlimited(C.lattice.manifold, omega);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(bs.size());
  for (std::size_t nu = 0; nu < C.size(); ++nu)
    m += C.weights[nu] * bs.evaluate_all(C.lattice.pts[nu]);
  m[0] -= 1.0;
  return m.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("constant-exactness weights are the voronoi masses", "[discretize]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.5, false, 21);
  const Cubature C = compute_cubature(L, 0.0);
  CHECK(C.weights.minCoeff() > 0.0);
  CHECK(C.weights.sum() == Catch::Approx(1.0).margin(1e-13));
  // each weight approximates its cell area: within a factor of the mesh ratio
  for (Eigen::Index i = 0; i < C.weights.size(); ++i) {
    CHECK(C.weights[i] < 10.0 / static_cast<double>(L.size()));
    CHECK(C.weights[i] > 0.01 / static_cast<double>(L.size()));
  }
}

TEST_CASE("cubature weights are positive, normalized and moment-exact",
          "[discretize]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.22, false, 22);
  const double omega = 20.0;
  const Cubature C = compute_cubature(L, omega);
  CHECK(C.omega_exact == omega);
  CHECK(C.weights.minCoeff() > 0.0);
  CHECK(C.weights.sum() == Catch::Approx(1.0).margin(1e-12));
  CHECK(C.residual <= 1e-10);
  CHECK(worst_moment(C, omega) <= 1e-10);
  // weights stay within the quasi-uniform bracket mu ~ 1/N
  const double n = static_cast<double>(C.size());
  CHECK(C.weights.maxCoeff() < 8.0 / n);
  CHECK(C.weights.minCoeff() > 0.005 / n);
}

TEST_CASE("cubature construction refuses an underdetermined lattice",
          "[discretize]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.5, false, 23);
  // far more moments than points
  CHECK_THROWS_AS(compute_cubature(L, 56.0), certification_error);
}

TEST_CASE("sample analysis inverts synthesis on cubature nodes",
          "[discretize]") {
  Rng rng(91);
  const double omega = 6.0;
  const Lattice L = generate_lattice(Manifold::S2, 0.25, false, 24);
  const Cubature C =
      compute_cubature(L, product_bandwidth(Manifold::S2, omega, omega));
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, omega, rng);
  const std::vector<double> samples = synthesize(f, C.lattice.pts);
  const HarmonicCoefficients back = discrete_fourier(samples, C, omega);
  CHECK(linear_combination(1.0, f, -1.0, back).norm() < 1e-11);
  std::vector<double> short_samples(samples.begin(), samples.end() - 1);
  CHECK_THROWS_AS(discrete_fourier(short_samples, C, omega), precondition_error);
}

TEST_CASE("discrete circle-mean inversion recovers even functions",
          "[discretize]") {
  Rng rng(92);
  const double omega = 12.0;
  HarmonicCoefficients f(Manifold::S2, omega);
  for (int k = 0; k <= 2; k += 2)
    for (int i = 1; i <= 2 * k + 1; ++i) f.set(k, i, rng.normal());
  const HarmonicCoefficients img = funk_radon_forward(f);
  const Lattice L = generate_lattice(Manifold::S2, 0.14, false, 25);
  const Cubature C =
      compute_cubature(L, product_bandwidth(Manifold::S2, omega, omega));
  const std::vector<double> samples = synthesize(img, C.lattice.pts);
  const HarmonicCoefficients rec = discrete_invert_funk_radon(samples, C, omega);
  CHECK(linear_combination(1.0, rec, -1.0, f).norm() < 1e-10);

  // an odd function lives in the transform kernel: its samples are zero and
  // the recovery is empty, not garbage
  HarmonicCoefficients odd(Manifold::S2, omega);
  odd.set(1, 1, 1.0);
  const HarmonicCoefficients oimg = funk_radon_forward(odd);
  CHECK(oimg.norm() < 1e-15);
  const std::vector<double> zeros(C.size(), 0.0);
  const HarmonicCoefficients zrec = discrete_invert_funk_radon(zeros, C, omega);
  CHECK(zrec.norm() == 0.0);
}

TEST_CASE("product cubature inherits exactness from its factors",
          "[discretize]") {
  const Lattice Lf = generate_lattice(Manifold::S2, 0.35, false, 33);
  const double factor_omega = 2.0 * degree_lambda(2 * max_degree_for(6.0));
  const Cubature Cf = compute_cubature(Lf, factor_omega);
  const Cubature Cp = product_cubature(Cf, Cf);
  CHECK(Cp.lattice.manifold == Manifold::S2xS2);
  CHECK(Cp.size() == Cf.size() * Cf.size());
  CHECK(Cp.weights.minCoeff() > 0.0);
  CHECK(Cp.weights.sum() == Catch::Approx(1.0).margin(1e-12));
  CHECK(Cp.omega_exact == factor_omega);
  // oracle on the product: moments up to the factor certificate
  CHECK(worst_moment(Cp, 20.0) < 1e-10);
}

TEST_CASE("discrete rotation inversion round trips through product samples",
          "[discretize]") {
  Rng rng(93);
  const double omega = 6.0;
  const Lattice Lf = generate_lattice(Manifold::S2, 0.35, false, 33);
  const double needed = 2.0 * degree_lambda(2 * max_degree_for(omega));
  const Cubature Cf = compute_cubature(Lf, needed);
  const Cubature Cp = product_cubature(Cf, Cf);

  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, omega, rng);
  const HarmonicCoefficients img = so3_radon_forward(f);
  const std::vector<double> samples = synthesize(img, Cp.lattice.pts);
  const HarmonicCoefficients rec = discrete_invert_so3(samples, Cp, omega);
  CHECK(linear_combination(1.0, rec, -1.0, f).norm() < 1e-10);

  // a certificate below 2 lambda(2K) is refused up front
  Cubature weak = Cp;
  weak.omega_exact = 20.0;
  CHECK_THROWS_AS(discrete_invert_so3(samples, weak, omega), precondition_error);
  // and so is a plain S2 cubature
  CHECK_THROWS_AS(discrete_invert_so3(samples, Cf, omega), precondition_error);
}

TEST_CASE("moment residual reports the worst slot faithfully", "[discretize]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.3, false, 26);
  const Cubature C = compute_cubature(L, 6.0);
  // against a wider basis than certified, the residual is genuine (nonzero)
  BasisSlot worst;
  const double r = cubature_moment_residual(C.lattice, C.weights, 42.0, &worst);
  CHECK(r > 1e-6);
  CHECK(degree_lambda(worst.k1) > 6.0);
  // within the certificate it matches the stored value
  CHECK(cubature_moment_residual(C.lattice, C.weights, 6.0) ==
        Catch::Approx(C.residual).margin(1e-15));
}
