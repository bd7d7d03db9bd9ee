#include <cstdio>
#include "manirad/transforms.hpp"

using namespace manirad;

int main() {
  Rng rng(21);

  // Funk-Radon: multiplier forward vs circle-mean oracle at random poles
  {
    HarmonicCoefficients c = random_coefficients(Manifold::S2, 20.0, rng);
    HarmonicCoefficients rc = funk_radon_forward(c);
    auto f = [&](const Vec3& v) { return synthesize_at(c, Point(v)); };
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vec3 pole = rng.sphere_point();
      const double oracle = funk_radon_geometric(f, great_circle(pole), 256);
      const double mult = synthesize_at(rc, Point(pole));
      worst = std::max(worst, std::fabs(oracle - mult));
    }
    std::printf("funk-radon  oracle vs multiplier: %.3e\n", worst);
  }

  // Hemispherical
  {
    HarmonicCoefficients c = random_coefficients(Manifold::S2, 20.0, rng);
    HarmonicCoefficients tc = hemispherical_forward(c);
    auto f = [&](const Vec3& v) { return synthesize_at(c, Point(v)); };
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vec3 pole = rng.sphere_point();
      const double oracle = hemispherical_geometric(f, pole, 128);
      const double mult = synthesize_at(tc, Point(pole));
      worst = std::max(worst, std::fabs(oracle - mult));
    }
    std::printf("hemispheric oracle vs multiplier: %.3e\n", worst);
  }

  // SO(3) Radon: the index-pairing check
  {
    HarmonicCoefficients c = random_coefficients(Manifold::SO3, 20.0, rng);
    HarmonicCoefficients rc = so3_radon_forward(c);
    auto f = [&](const RotationPoint& g) { return synthesize_at(c, Point(g)); };
    double worst = 0.0, worst_swapped = 0.0;
    for (int t = 0; t < 10; ++t) {
      const Vec3 x = rng.sphere_point(), y = rng.sphere_point();
      const double oracle = so3_radon_geometric(f, x, y, 256);
      const double mult = synthesize_at(rc, Point(ProductPoint{x, y}));
      const double mult_swapped = synthesize_at(rc, Point(ProductPoint{y, x}));
      worst = std::max(worst, std::fabs(oracle - mult));
      worst_swapped = std::max(worst_swapped, std::fabs(oracle - mult_swapped));
    }
    std::printf("so3-radon   oracle vs multiplier: %.3e  (swapped args: %.3e)\n",
                worst, worst_swapped);
  }

  // round trips + adjoint identity
  {
    HarmonicCoefficients c = random_coefficients(Manifold::SO3, 30.0, rng);
    HarmonicCoefficients back = so3_radon_inverse(so3_radon_forward(c));
    BasisSet bs = BasisSet::bandlimited(Manifold::SO3, 30.0);
    std::printf("so3 round trip: %.3e\n",
                (bs.flatten(back) - bs.flatten(c)).cwiseAbs().maxCoeff());
    HarmonicCoefficients rc = so3_radon_forward(c);
    const double lhs = c.norm();
    const double rhs = sobolev_norm(rc, 0.5, 2.0);  // (I - 2 Delta)^{1/4} weight
    std::printf("adjoint identity: %.3e  (lhs %.6f rhs %.6f)\n",
                std::fabs(lhs - rhs), lhs, rhs);
  }

  // xray parity
  {
    HarmonicCoefficients c(Manifold::SO3, 12.0);
    c.set(1, 2, 3, 1.0);
    HarmonicCoefficients p = xray_crystallographic(c);
    std::printf("xray kills odd: %.3e\n", p.norm());
    HarmonicCoefficients c2 = random_coefficients(Manifold::SO3, 12.0, rng);
    HarmonicCoefficients p2 = xray_crystallographic(c2);
    const Vec3 x = rng.sphere_point(), y = rng.sphere_point();
    const double a = synthesize_at(p2, Point(ProductPoint{x, y}));
    const double b = synthesize_at(p2, Point(ProductPoint{Vec3(-x), y}));
    std::printf("xray even in x: %.3e\n", std::fabs(a - b));
  }

  // multiplier table spot values
  {
    MultiplierTable fr = funk_radon_multipliers(8);
    MultiplierTable h = hemispherical_multipliers(5);
    std::printf("fr: mu0=%.12f mu2=%.12f mu4=%.12f mu1=%.1e\n", fr.entry(0),
                fr.entry(2), fr.entry(4), fr.entry(1));
    std::printf("hemi: mu0=%.12f mu1=%.12f mu3=%.12f mu2=%.1e\n", h.entry(0),
                h.entry(1), h.entry(3), h.entry(2));
  }
  return 0;
}
