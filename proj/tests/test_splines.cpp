#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/geometry.hpp"
#include "manirad/splines.hpp"
#include "manirad/transforms.hpp"

using namespace manirad;

namespace {

FunctionalSet mixed_set(Rng& rng) {
  FunctionalSet fs;
  fs.manifold = Manifold::S2;
  for (int i = 0; i < 12; ++i) fs.items.push_back(PointEvalF{Point(rng.sphere_point())});
  for (int i = 0; i < 6; ++i) fs.items.push_back(SymPointPairF{rng.sphere_point()});
  for (int i = 0; i < 6; ++i)
    fs.items.push_back(CircleIntegralF{great_circle(rng.sphere_point())});
  for (int i = 0; i < 6; ++i) fs.items.push_back(HemisphereIntegralF{rng.sphere_point()});
  return fs;
}

}  // namespace

TEST_CASE("truncation degree grows with falling smoothness and respects caps",
          "[splines]") {
  CHECK_THROWS_AS(choose_kmax(Manifold::S2, 1.0), precondition_error);
  CHECK_THROWS_AS(choose_kmax(Manifold::SO3, 1.5), precondition_error);
  double r2 = 0.0, r4 = 0.0;
  const int k2 = choose_kmax(Manifold::S2, 2.0, -1.0, &r2);
  const int k4 = choose_kmax(Manifold::S2, 4.0, -1.0, &r4);
  CHECK(k2 >= k4);
  CHECK(k2 <= spline_degree_cap(Manifold::S2));
  CHECK(r4 < 1e-12);
  CHECK(choose_kmax(Manifold::SO3, 2.5) <= spline_degree_cap(Manifold::SO3));
}

TEST_CASE("functional sets are validated for kind, emptiness and collisions",
          "[splines]") {
  FunctionalSet empty;
  CHECK_THROWS_AS(validate_functional_set(empty), precondition_error);
  FunctionalSet bad;
  bad.manifold = Manifold::SO3;
  bad.items.push_back(SymPointPairF{Vec3::UnitZ()});  // S2-only kind
  CHECK_THROWS_AS(validate_functional_set(bad), precondition_error);
  FunctionalSet dup;
  dup.manifold = Manifold::S2;
  dup.items.push_back(PointEvalF{Point(Vec3::UnitX())});
  dup.items.push_back(PointEvalF{Point(Vec3::UnitX())});
  CHECK_THROWS_AS(validate_functional_set(dup), precondition_error);
  // antipodal circle poles describe the same circle and must collide too
  FunctionalSet circ;
  circ.manifold = Manifold::S2;
  circ.items.push_back(CircleIntegralF{great_circle(Vec3::UnitZ())});
  circ.items.push_back(CircleIntegralF{great_circle(Vec3(-Vec3::UnitZ()))});
  CHECK_THROWS_AS(validate_functional_set(circ), precondition_error);
}

TEST_CASE("spectral functional application matches quadrature oracles",
          "[splines]") {
  Rng rng(81);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 20.0, rng);
  const auto eval = [&](const Vec3& u) { return synthesize_at(f, Point(u)); };
  const Vec3 x = rng.sphere_point();
  CHECK(functional_apply(SymPointPairF{x}, f) ==
        Catch::Approx(eval(x) + eval(Vec3(-x))).margin(1e-13));
  const GreatCircle c = great_circle(rng.sphere_point());
  CHECK(functional_apply(CircleIntegralF{c}, f) ==
        Catch::Approx(funk_radon_geometric(eval, c, 64)).margin(1e-12));
  const Vec3 pole = rng.sphere_point();
  CHECK(functional_apply(HemisphereIntegralF{pole}, f) ==
        Catch::Approx(hemispherical_geometric(eval, pole, 48)).margin(1e-11));
}

TEST_CASE("the interpolant hits every functional to solver precision",
          "[splines]") {
  Rng rng(82);
  FunctionalSet fs = mixed_set(rng);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 30.0, rng);
  const Spline s = interpolate_function(f, fs, 1.5);
  CHECK(s.path == Spline::SolvePath::cholesky);
  for (std::size_t i = 0; i < fs.size(); ++i)
    CHECK(functional_apply(fs.items[i], s.coefficients) ==
          Catch::Approx(s.values[i]).margin(1e-9));
  CHECK(s.diag.residual_inf < 1e-9);
}

TEST_CASE("the interpolant minimizes the smoothness norm", "[splines]") {
  Rng rng(83);
  FunctionalSet fs = mixed_set(rng);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 30.0, rng);
  const Spline s = interpolate_function(f, fs, 1.5);
  const OptimalityReport rep = optimality_check(s, f, 20, rng);
  CHECK(rep.minimal);
  CHECK(rep.max_orthogonality_defect < 1e-8);
  CHECK(rep.max_norm_deficit <= 1e-10 * rep.norm_bound);
  // f itself interpolates its own data, so the spline norm cannot exceed it
  CHECK(sobolev_norm(s.coefficients, s.t) <= sobolev_norm(f, s.t) * (1 + 1e-12));
}

TEST_CASE("ill conditioned smoothness switches to the stable solve path",
          "[splines]") {
  Rng rng(84);
  const Lattice L = generate_lattice(Manifold::S2, 0.45, false, 12);
  FunctionalSet fs;
  fs.manifold = Manifold::S2;
  for (const Point& p : L.pts) fs.items.push_back(PointEvalF{p});
  Eigen::VectorXd v(fs.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  const Spline lo = solve_spline(fs, v, 1.5);
  CHECK(lo.path == Spline::SolvePath::cholesky);
  const Spline hi = solve_spline(fs, v, 5.0);
  CHECK(hi.path == Spline::SolvePath::whitened_qr);
  const double vmax = v.cwiseAbs().maxCoeff();
  CHECK(hi.diag.residual_inf <= 1e-10 * vmax);
  for (std::size_t i = 0; i < fs.size(); i += 7)
    CHECK(functional_apply(fs.items[i], hi.coefficients) ==
          Catch::Approx(v[i]).margin(1e-9 * vmax));
}

TEST_CASE("denser samples give a sharply better interpolant", "[splines]") {
  Rng rng(85);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  const QuadratureGrid ref = s2_quadrature(16);
  double errs[2];
  const double rhos[2] = {0.5, 0.25};
  for (int idx = 0; idx < 2; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, 14);
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    for (const Point& p : L.pts) fs.items.push_back(PointEvalF{p});
    const Spline s = interpolate_function(f, fs, 2.0);
    double worst = 0.0;
    for (const Point& p : ref.pts)
      worst = std::max(worst, std::fabs(synthesize_at(s.coefficients, p) -
                                        synthesize_at(f, p)));
    errs[idx] = worst;
  }
  // t = 2 gives at least a cubic rate in the fill distance; halving the
  // spacing must cut the error by far more than the factor 4 below
  CHECK(errs[1] < errs[0] / 4.0);
}

TEST_CASE("circle-sample inversion recovers even functions and sharpens with level",
          "[splines]") {
  Rng rng(86);
  HarmonicCoefficients f(Manifold::S2, 12.0);
  for (int k = 0; k <= 2; k += 2)
    for (int i = 1; i <= 2 * k + 1; ++i) f.set(k, i, rng.normal());
  const HarmonicCoefficients img = funk_radon_forward(f);
  const Lattice L = generate_lattice(Manifold::S2, 0.35, true, 15);
  std::vector<Vec3> pts;
  std::vector<double> vals;
  for (const Point& p : L.pts) {
    pts.push_back(std::get<Vec3>(p));
    vals.push_back(synthesize_at(img, p));
  }
  double err[2];
  for (int l = 0; l < 2; ++l) {
    const HarmonicCoefficients rec = spline_inversion_funk_radon(pts, vals, 2.0, l);
    err[l] = linear_combination(1.0, rec, -1.0, f).norm();
  }
  CHECK(err[0] < 1e-2);
  CHECK(err[1] < err[0] / 5.0);

  // asymmetric sample sets cannot be folded and are refused
  pts.push_back(rng.sphere_point());
  vals.push_back(0.0);
  CHECK_THROWS_AS(spline_inversion_funk_radon(pts, vals, 2.0, 0), precondition_error);
}

TEST_CASE("rotation inversion from product samples converges on the image side",
          "[splines]") {
  Rng rng(87);
  const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 2.0, rng);
  const HarmonicCoefficients img = so3_radon_forward(f);
  const Lattice L = generate_lattice(Manifold::S2xS2, 0.55, false, 16);
  std::vector<ProductPoint> pts;
  std::vector<double> vals;
  for (const Point& p : L.pts) {
    pts.push_back(std::get<ProductPoint>(p));
    vals.push_back(synthesize_at(img, p));
  }
  const HarmonicCoefficients rec = spline_inversion_so3(pts, vals, 2.0, 0);
  const double err = linear_combination(1.0, rec, -1.0, f).norm();
  CHECK(err < 5e-2 * f.norm());
}
