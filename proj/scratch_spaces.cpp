#include <cstdio>
#include "manirad/spaces.hpp"
#include "manirad/quadrature.hpp"

using namespace manirad;

static double roundtrip(Manifold m, double omega) {
  Rng rng(7);
  HarmonicCoefficients c = random_coefficients(m, omega, rng);
  const double need = product_bandwidth(m, omega, omega);
  QuadratureGrid q = quadrature_for_lambda(m, need);
  std::vector<double> vals = synthesize(c, q.pts);
  HarmonicCoefficients c2 = analyze(m, q.pts, vals, q.w, omega, q.exact_lambda);
  BasisSet bs = BasisSet::bandlimited(m, omega);
  return (bs.flatten(c2) - bs.flatten(c)).cwiseAbs().maxCoeff();
}

int main() {
  std::printf("S2    omega=42  err %.3e\n", roundtrip(Manifold::S2, 42.0));
  std::printf("SO3   omega=30  err %.3e\n", roundtrip(Manifold::SO3, 30.0));
  std::printf("S2xS2 omega=24  err %.3e\n", roundtrip(Manifold::S2xS2, 24.0));

  // sobolev norm scale check: pure degree-k slot
  HarmonicCoefficients c(Manifold::SO3, 12.0);
  c.set(3, 2, 5, 1.0);
  double n = sobolev_norm(c, 1.5);
  std::printf("sobolev pure slot: %.12f vs %.12f\n", n, std::pow(1.0 + 4.0 * 12.0, 0.75));

  // parseval: norm of coefficients == L2 norm via quadrature
  Rng rng(3);
  HarmonicCoefficients f = random_coefficients(Manifold::S2, 20.0, rng);
  QuadratureGrid q = s2_quadrature(10);
  std::vector<double> v = synthesize(f, q.pts);
  double l2 = 0; for (size_t i = 0; i < v.size(); ++i) l2 += q.w[i] * v[i] * v[i];
  std::printf("parseval: %.3e\n", std::fabs(std::sqrt(l2) - f.norm()));
  return 0;
}
