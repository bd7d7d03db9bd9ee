#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "manirad/frames.hpp"

using namespace manirad;

TEST_CASE("the dyadic filter hits its branch values exactly", "[frames]") {
  CHECK(frame_cutoff(0.0) == 1.0);
  CHECK(frame_cutoff(1.0) == 1.0);
  CHECK(frame_cutoff(4.0) == 0.0);
  CHECK(frame_cutoff(9.0) == 0.0);
  // strictly decreasing across the blend
  double prev = 1.0;
  for (double s = 1.1; s < 4.0; s += 0.1) {
    const double v = frame_cutoff(s);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  const FilterBank fb = build_filter_bank(3);
  // squared filters telescope: sum phi_j^2 = 1 on [0, 4^jmax], exactly in
  // floating point because the branches cancel pairwise
  CHECK(fb.partition_residual() == 0.0);
  CHECK(fb.phi(0, 0.0) == 1.0);
  for (int j = 1; j <= 3; ++j) {
    CHECK(fb.phi(j, fb.band_lo(j)) == 0.0);
    CHECK(fb.phi(j, fb.band_hi(j)) == 0.0);
    CHECK(fb.phi(j, 2.0 * fb.band_lo(j)) > 0.0);
  }
  CHECK_THROWS_AS(build_filter_bank(0), precondition_error);
}

TEST_CASE("the frame is parseval on its certified coverage", "[frames]") {
  const FrameSystem fs = build_frame(2);
  CHECK(fs.coverage == 16.0);
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const HarmonicCoefficients f =
        random_coefficients(Manifold::S2, fs.coverage, rng);
    const FrameCoefficients c = frame_analyze(f, fs);
    // energy identity
    CHECK(c.squared_sum() ==
          Catch::Approx(f.squared_norm()).epsilon(1e-12));
    // exact reconstruction by the adjoint
    const HarmonicCoefficients back = frame_synthesize(c, fs);
    CHECK(linear_combination(1.0, f, -1.0, back).norm() < 1e-12 * f.norm());
  }
  // beyond-coverage input is refused
  Rng rng2(102);
  const HarmonicCoefficients wide = random_coefficients(Manifold::S2, 30.0, rng2);
  CHECK_THROWS_AS(frame_analyze(wide, fs), precondition_error);
}

TEST_CASE("analysis coefficients localize by band", "[frames]") {
  const FrameSystem fs = build_frame(2);
  // a pure degree-1 function (lambda = 2) meets levels 0 and 1 only
  HarmonicCoefficients f(Manifold::S2, 2.0);
  f.set(1, 2, 1.0);
  const FrameCoefficients c = frame_analyze(f, fs);
  REQUIRE(c.level.size() == 3);
  CHECK(c.level[0].norm() > 0.0);
  CHECK(c.level[1].norm() > 0.0);
  CHECK(c.level[2].norm() == 0.0);
  // the two active levels still split the energy exactly
  CHECK(c.level[0].squaredNorm() + c.level[1].squaredNorm() ==
        Catch::Approx(1.0).epsilon(1e-12));
  // a constant meets only level 0, where phi is identically 1
  HarmonicCoefficients one(Manifold::S2, 0.0);
  one.set(0, 1, 3.0);
  const FrameCoefficients cc = frame_analyze(one, fs);
  CHECK(cc.level[0].squaredNorm() == Catch::Approx(9.0).epsilon(1e-12));
  CHECK(cc.level[1].norm() == 0.0);
}

TEST_CASE("atom spectra match the closed-form kernel values", "[frames]") {
  const FrameSystem fs = build_frame(2);
  Rng rng(103);
  for (const int j : {0, 1, 2}) {
    const FrameLevel& lv = fs.levels[j];
    const std::size_t k = lv.atoms() / 2;
    const HarmonicCoefficients atom = frame_atom(fs, j, k);
    // dual route: spectral synthesis against the zonal closed form
    const Vec3 center = std::get<Vec3>(lv.lattice.pts[k]);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec3 y = rng.sphere_point();
      CHECK(synthesize_at(atom, Point(y)) ==
            Catch::Approx(frame_atom_value(lv, center, y)).margin(1e-10));
    }
    // supported on the level band only
    for (const auto& [key, blk] : atom.blocks()) {
      CHECK(degree_lambda(key.first) >= lv.band_lo);
      CHECK(degree_lambda(key.first) <= lv.band_hi);
    }
  }
}

TEST_CASE("weighted atoms have subunit norm and the weights are a cubature",
          "[frames]") {
  const FrameSystem fs = build_frame(2);
  for (const FrameLevel& lv : fs.levels) {
    CHECK(lv.b.minCoeff() > 0.0);
    CHECK(lv.b.sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(lv.cubature_residual <= 1e-10);
    for (std::size_t k = 0; k < lv.atoms(); k += std::max<std::size_t>(1, lv.atoms() / 6)) {
      const HarmonicCoefficients atom = frame_atom(fs, lv.j, k);
      // Parseval frames have no atom longer than 1; the weight supplies
      // the sqrt(b) normalization
      CHECK(std::sqrt(lv.b[k]) * atom.norm() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("atoms decay polynomially away from their center", "[frames]") {
  const FrameSystem fs = build_frame(3);
  for (const int j : {1, 2, 3}) {
    const LocalizationReport rep = localization_profile(fs, j, 0);
    CHECK(rep.center_value > 0.0);
    CHECK(rep.sup_abs == Catch::Approx(rep.center_value));  // peak at center
    // normalized decay constants stay bounded across levels
    CHECK(rep.c2 < 40.0 * rep.center_value * std::pow(0.25, j));
    CHECK(rep.c4 > rep.c2);  // higher moment, larger constant
  }
}

TEST_CASE("fully discrete frame representation is exact on its band",
          "[frames]") {
  Rng rng(104);
  const FrameSystem fs = build_frame(2);
  const int J = 1;
  const double omega = std::pow(4.0, J) - 1.0;  // E_3: degrees 0 and 1
  const double need =
      product_bandwidth(Manifold::S2, omega, fs.levels[J].band_hi);
  const Lattice Lm = generate_lattice(Manifold::S2, 0.3, false, 41);
  const Cubature master = compute_cubature(Lm, need);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, omega, rng);
  const std::vector<double> samples = synthesize(f, master.lattice.pts);
  const HarmonicCoefficients rec =
      discrete_frame_representation(samples, master, fs, J);
  CHECK(linear_combination(1.0, f, -1.0, rec).norm() < 1e-10);

  // a master rule too weak for the level bands is rejected, not misused
  const Cubature weak = compute_cubature(Lm, 6.0);
  CHECK_THROWS_AS(discrete_frame_representation(samples, weak, fs, J),
                  precondition_error);
  std::vector<double> short_samples(samples.begin(), samples.end() - 1);
  CHECK_THROWS_AS(discrete_frame_representation(short_samples, master, fs, J),
                  precondition_error);
}
