#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/geometry.hpp"
#include "manirad/transforms.hpp"

using namespace manirad;

TEST_CASE("great circle multipliers take their known low-degree values",
          "[transforms]") {
  const MultiplierTable t = funk_radon_multipliers(8);
  CHECK(t.entry(0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(t.entry(2) == Catch::Approx(-0.5).margin(1e-15));
  CHECK(t.entry(4) == Catch::Approx(0.375).margin(1e-15));
  CHECK(t.entry(6) == Catch::Approx(-0.3125).margin(1e-14));
  for (int k = 1; k <= 7; k += 2) CHECK(t.entry(k) == 0.0);
  CHECK(t.kernel_degrees() == std::set<int>{1, 3, 5, 7});
  CHECK_THROWS_AS(t.entry(9), precondition_error);

  const MultiplierTable h = hemispherical_multipliers(6);
  CHECK(h.entry(0) == 0.5);
  CHECK(h.entry(1) == Catch::Approx(0.25).margin(1e-15));
  CHECK(h.entry(3) == Catch::Approx(-0.0625).margin(1e-15));
  CHECK(h.entry(2) == 0.0);
  CHECK(h.entry(4) == 0.0);

  const MultiplierTable s = so3_radon_multipliers(5);
  for (int k = 0; k <= 5; ++k)
    CHECK(s.entry(k) == Catch::Approx(1.0 / (2 * k + 1)).margin(1e-16));
}

TEST_CASE("circle averages of harmonics reproduce the multiplier table",
          "[transforms]") {
  // oracle first: trapezoid averages of Y_k^i over random great circles,
  // compared against mu_k Y_k^i at the pole
  Rng rng(71);
  const MultiplierTable t = funk_radon_multipliers(6);
  for (int trial = 0; trial < 3; ++trial) {
    const GreatCircle c = great_circle(rng.sphere_point());
    for (int k = 0; k <= 6; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i) {
        const double geo = funk_radon_geometric(
            [&](const Vec3& u) { return eval_sph_harmonic(k, i, u); }, c, 64);
        const double want = t.entry(k) * eval_sph_harmonic(k, i, c.pole);
        CHECK(geo == Catch::Approx(want).margin(1e-12));
      }
  }
}

TEST_CASE("hemisphere averages of harmonics reproduce the multiplier table",
          "[transforms]") {
  Rng rng(72);
  const MultiplierTable t = hemispherical_multipliers(5);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec3 pole = rng.sphere_point();
    for (int k = 0; k <= 5; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i) {
        const double geo = hemispherical_geometric(
            [&](const Vec3& u) { return eval_sph_harmonic(k, i, u); }, pole, 48);
        const double want = t.entry(k) * eval_sph_harmonic(k, i, pole);
        CHECK(geo == Catch::Approx(want).margin(1e-11));
      }
  }
}

TEST_CASE("rotation circle averages match the coefficient transform",
          "[transforms]") {
  Rng rng(73);
  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 6.0, rng);
  const HarmonicCoefficients g = so3_radon_forward(f);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 x = rng.sphere_point();
    const Vec3 y = rng.sphere_point();
    const double geo = so3_radon_geometric(
        [&](const RotationPoint& r) { return synthesize_at(f, Point(r)); }, x, y,
        64);
    const double want = synthesize_at(g, Point(ProductPoint{x, y}));
    CHECK(geo == Catch::Approx(want).margin(1e-12));
  }
}

TEST_CASE("forward coefficient maps agree with pointwise circle integration",
          "[transforms]") {
  Rng rng(74);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 20.0, rng);
  const HarmonicCoefficients Ff = funk_radon_forward(f);
  const HarmonicCoefficients Hf = hemispherical_forward(f);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec3 pole = rng.sphere_point();
    const auto eval = [&](const Vec3& u) { return synthesize_at(f, Point(u)); };
    CHECK(funk_radon_geometric(eval, great_circle(pole), 64) ==
          Catch::Approx(synthesize_at(Ff, Point(pole))).margin(1e-12));
    CHECK(hemispherical_geometric(eval, pole, 48) ==
          Catch::Approx(synthesize_at(Hf, Point(pole))).margin(1e-11));
  }
}

TEST_CASE("transform round trips recover the admissible part exactly",
          "[transforms]") {
  Rng rng(75);
  // even degrees only: the great circle transform kills the odd part
  HarmonicCoefficients even(Manifold::S2, 20.0);
  for (int k = 0; k <= 4; k += 2)
    for (int i = 1; i <= 2 * k + 1; ++i) even.set(k, i, rng.normal());
  const HarmonicCoefficients back = funk_radon_inverse(funk_radon_forward(even));
  CHECK(linear_combination(1.0, even, -1.0, back).norm() < 1e-13);

  // odd degrees only for the hemisphere map
  HarmonicCoefficients odd(Manifold::S2, 20.0);
  for (int k = 1; k <= 3; k += 2)
    for (int i = 1; i <= 2 * k + 1; ++i) odd.set(k, i, rng.normal());
  const HarmonicCoefficients hback =
      hemispherical_inverse(hemispherical_forward(odd));
  CHECK(linear_combination(1.0, odd, -1.0, hback).norm() < 1e-13);

  // the rotation transform is injective: full random input round trips
  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 12.0, rng);
  const HarmonicCoefficients rback = so3_radon_inverse(so3_radon_forward(f));
  CHECK(linear_combination(1.0, f, -1.0, rback).norm() < 1e-12);
}

TEST_CASE("rotation transform scales bandwidth and lands on diagonal blocks",
          "[transforms]") {
  Rng rng(76);
  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 6.0, rng);
  const HarmonicCoefficients g = so3_radon_forward(f);
  CHECK(g.manifold() == Manifold::S2xS2);
  CHECK(g.omega() == 12.0);
  for (const auto& [key, blk] : g.blocks()) {
    CHECK(key.first == key.second);
    const int k = key.first;
    // slot scaling is (2k+1)^{-1/2}
    const double scale = 1.0 / std::sqrt(2.0 * k + 1.0);
    for (int i = 1; i <= 2 * k + 1; ++i)
      for (int j = 1; j <= 2 * k + 1; ++j)
        CHECK(g.get(k, i, k, j) ==
              Catch::Approx(scale * f.get(k, i, j)).margin(1e-15));
  }
}

TEST_CASE("inverses refuse content the forward map cannot produce",
          "[transforms]") {
  // odd content blocks the great circle inverse
  HarmonicCoefficients odd(Manifold::S2, 6.0);
  odd.set(1, 2, 0.3);
  CHECK_THROWS_AS(funk_radon_inverse(odd), precondition_error);
  // constants and even content block the hemisphere inverse
  HarmonicCoefficients cst(Manifold::S2, 6.0);
  cst.set(0, 1, 1.0);
  CHECK_THROWS_AS(hemispherical_inverse(cst), precondition_error);
  HarmonicCoefficients ev(Manifold::S2, 6.0);
  ev.set(2, 1, 0.5);
  CHECK_THROWS_AS(hemispherical_inverse(ev), precondition_error);
  // off-diagonal product content blocks the rotation inverse
  HarmonicCoefficients off(Manifold::S2xS2, 8.0);
  off.set(1, 1, 2, 1, 0.7);
  CHECK_THROWS_AS(so3_radon_inverse(off), precondition_error);
  // content below the rejection threshold is dropped, not fatal
  HarmonicCoefficients tiny(Manifold::S2, 6.0);
  tiny.set(2, 1, 0.4);
  tiny.set(1, 1, 1e-14);
  CHECK_NOTHROW(funk_radon_inverse(tiny));
  // manifold mismatches
  CHECK_THROWS_AS(so3_radon_forward(HarmonicCoefficients(Manifold::S2, 6.0)),
                  precondition_error);
  CHECK_THROWS_AS(funk_radon_forward(HarmonicCoefficients(Manifold::SO3, 6.0)),
                  precondition_error);
}

TEST_CASE("crystallographic variant keeps exactly the even-degree image",
          "[transforms]") {
  Rng rng(77);
  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 12.0, rng);
  const HarmonicCoefficients full = so3_radon_forward(f);
  const HarmonicCoefficients sym = xray_crystallographic(f);
  for (const auto& [key, blk] : full.blocks()) {
    if (key.first % 2 == 0) {
      CHECK((sym.get(key.first, 1, key.second, 1)) ==
            Catch::Approx(full.get(key.first, 1, key.second, 1)).margin(1e-15));
    }
  }
  for (const auto& [key, blk] : sym.blocks()) CHECK(key.first % 2 == 0);
  // oracle: the symmetrized circle integral (Rf(x,y) + Rf(-x,y)) / 2
  const Vec3 x = rng.sphere_point();
  const Vec3 y = rng.sphere_point();
  const auto eval = [&](const RotationPoint& r) { return synthesize_at(f, Point(r)); };
  const double plus = so3_radon_geometric(eval, x, y, 64);
  const double minus = so3_radon_geometric(eval, Vec3(-x), y, 64);
  CHECK(synthesize_at(sym, Point(ProductPoint{x, y})) ==
        Catch::Approx(0.5 * (plus + minus)).margin(1e-12));
}
