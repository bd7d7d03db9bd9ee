#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/reconstruct.hpp"

using namespace manirad;

namespace {

std::vector<double> sample_on(const HarmonicCoefficients& f, const Lattice& L) {
  return synthesize(f, L.pts);
}

}  // namespace

TEST_CASE("cell-average approximation nails constants in one application",
          "[reconstruct]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.5, false, 31);
  const std::vector<double> ones(L.size(), 2.5);
  const HarmonicCoefficients f = voronoi_approximation(ones, L, 6.0);
  // the step interpolant of a constant is the constant; projection keeps it
  CHECK(f.get(0, 1) == Catch::Approx(2.5).margin(1e-10));
  for (int k = 1; k <= 2; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i)
      CHECK(std::fabs(f.get(k, i)) < 1e-10);
}

TEST_CASE("cell-average error shrinks with the lattice spacing",
          "[reconstruct]") {
  Rng rng(111);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  double errs[2];
  const double rhos[2] = {0.4, 0.2};
  for (int idx = 0; idx < 2; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, 32);
    const HarmonicCoefficients g = voronoi_approximation(sample_on(f, L), L, 6.0);
    errs[idx] = linear_combination(1.0, g, -1.0, f).norm();
  }
  CHECK(errs[1] < 0.7 * errs[0]);
}

TEST_CASE("the fixed point iteration converges geometrically to the truth",
          "[reconstruct]") {
  Rng rng(112);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  const Lattice L = generate_lattice(Manifold::S2, 0.3, false, 33);
  const auto [rec, tr] =
      iterative_reconstruct(sample_on(f, L), L, 6.0, 1e-11, 60, &f);
  CHECK(tr.converged);
  CHECK(linear_combination(1.0, rec, -1.0, f).norm() < 1e-9);
  CHECK(tr.contraction > 0.0);
  CHECK(tr.contraction < 1.0);
  // true errors decrease monotonically once the iteration settles
  for (std::size_t i = 4; i < tr.errors.size(); ++i)
    CHECK(tr.errors[i] <= tr.errors[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("denser sampling contracts faster", "[reconstruct]") {
  Rng rng(113);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  double contraction[2];
  const double rhos[2] = {0.42, 0.21};
  for (int idx = 0; idx < 2; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, 34);
    const auto [rec, tr] =
        iterative_reconstruct(sample_on(f, L), L, 6.0, 1e-11, 60, &f);
    contraction[idx] = tr.contraction;
  }
  CHECK(contraction[1] < contraction[0]);
}

TEST_CASE("too few samples for the bandwidth is refused up front",
          "[reconstruct]") {
  const Lattice L = generate_lattice(Manifold::S2, 0.5, false, 35);
  const std::vector<double> samples(L.size(), 1.0);
  // dim E_56 = 64 exceeds any 0.5-spaced lattice cardinality
  CHECK_THROWS_AS(iterative_reconstruct(samples, L, 56.0, 1e-10, 30, nullptr),
                  certification_error);
}

TEST_CASE("sampling bounds are tight for constants and certified positive",
          "[reconstruct]") {
  Lattice L = generate_lattice(Manifold::S2, 0.3, false, 36);
  // omega = 0: G is the 1x1 matrix rho^2 N, so both bounds equal it exactly
  const auto [a0, b0] = pp_frame_bounds(L, 0.0);
  const double expected = std::pow(L.rho, 2) * static_cast<double>(L.size());
  CHECK(a0 == Catch::Approx(expected).margin(1e-12));
  CHECK(b0 == Catch::Approx(expected).margin(1e-12));
  // full bandwidth: positive lower bound, ordered pair
  const auto [A, B] = pp_frame_bounds(L, 6.0);
  CHECK(A > 0.0);
  CHECK(B >= A);

  // rank deficiency is a certification failure: all points on one circle
  // cannot span E_6
  Lattice ring;
  ring.manifold = Manifold::S2;
  ring.rho = 0.3;
  for (int t = 0; t < 40; ++t) {
    const double ph = 2.0 * pi * t / 40;
    ring.pts.emplace_back(Vec3(std::cos(ph), std::sin(ph), 0.0));
  }
  CHECK_THROWS_AS(pp_frame_bounds(ring, 6.0), certification_error);
}

TEST_CASE("the relaxed frame iteration meets its theoretical ratio",
          "[reconstruct]") {
  Rng rng(114);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  const Lattice L = generate_lattice(Manifold::S2, 0.12, false, 37);
  const auto [rec, tr] =
      frame_algorithm(sample_on(f, L), L, 6.0, std::nullopt, 1e-12, 50, &f);
  CHECK(tr.converged);
  CHECK(linear_combination(1.0, rec, -1.0, f).norm() < 1e-10);
  CHECK(tr.bound > 0.0);
  CHECK(tr.bound < 1.0);
  CHECK(tr.contraction <= tr.bound + 0.05);
}

TEST_CASE("the relaxation parameter is validated against the upper bound",
          "[reconstruct]") {
  Rng rng(115);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  const Lattice L = generate_lattice(Manifold::S2, 0.2, false, 38);
  const std::vector<double> samples = sample_on(f, L);
  const auto [A, B] = pp_frame_bounds(L, 6.0);
  CHECK_THROWS_AS(
      frame_algorithm(samples, L, 6.0, 2.0 / B + 1.0, 1e-10, 30, nullptr),
      precondition_error);
  CHECK_THROWS_AS(frame_algorithm(samples, L, 6.0, -0.5, 1e-10, 30, nullptr),
                  precondition_error);
  // a legal but conservative gamma still converges, just slower
  const auto [rec, tr] =
      frame_algorithm(samples, L, 6.0, 0.5 / B, 1e-10, 200, &f);
  CHECK(tr.converged);
  CHECK(linear_combination(1.0, rec, -1.0, f).norm() < 1e-8);
  std::vector<double> bad(L.size() - 1, 0.0);
  CHECK_THROWS_AS(frame_algorithm(bad, L, 6.0, std::nullopt, 1e-10, 30, nullptr),
                  precondition_error);
}

TEST_CASE("a sparse lattice fails the contraction certificate instead of "
          "returning junk",
          "[reconstruct]") {
  Rng rng(116);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 30.0, rng);
  // barely enough points for dim E_30 = 36, far too sparse to contract
  const Lattice L = generate_lattice(Manifold::S2, 0.52, false, 39);
  REQUIRE(L.size() >= 36);
  CHECK_THROWS_AS(
      iterative_reconstruct(sample_on(f, L), L, 30.0, 1e-10, 60, nullptr),
      certification_error);
}
