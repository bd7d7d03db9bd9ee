#include <cstdio>
#include <random>

#include "manirad/frames.hpp"
#include "manirad/transforms.hpp"

using namespace manirad;

static HarmonicCoefficients random_s2(double omega, std::mt19937_64& rng) {
  HarmonicCoefficients c(Manifold::S2, omega);
  std::normal_distribution<double> nd;
  const int K = max_degree_for(omega);
  for (int k = 0; k <= K; ++k)
    for (int i = 1; i <= 2 * k + 1; ++i) c.set(k, i, nd(rng));
  return c;
}

int main() {
  setvbuf(stdout, nullptr, _IONBF, 0);

  // 1. filter bank: PoU, telescoping, band edges
  {
    FilterBank fb = build_filter_bank(3);
    printf("[1] PoU residual (J=3, covered band): %.3e\n", fb.partition_residual());
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double s = 1024.0 * i / 2000.0;  // out to 4^5, beyond coverage
      double acc = 0.0;
      for (int j = 0; j <= 3; ++j) acc += fb.phi_sq(j, s);
      worst = std::max(worst, std::fabs(acc - FilterBank::g(s / 64.0)));
    }
    printf("[1] telescoping defect out to 4^5: %.3e\n", worst);
    printf("[1] G support: G(0.24)=%.3e G(0.26)=%.3e G(3.9)=%.3e G(4.1)=%.3e\n",
           FilterBank::G(0.24), FilterBank::G(0.26), FilterBank::G(3.9),
           FilterBank::G(4.1));
  }

  // 2. build frame J=3, report per-level stats
  FrameSystem fs = build_frame(3);
  for (const auto& lv : fs.levels)
    printf("[2] level %d: band [%g, %g] kmax=%d atoms=%zu wmin=%.3e wmax=%.3e resid=%.2e\n",
           lv.j, lv.band_lo, lv.band_hi, lv.kmax, lv.atoms(), lv.b.minCoeff(),
           lv.b.maxCoeff(), lv.cubature_residual);
  printf("[2] total atoms: %zu, coverage %g\n", fs.atom_count(), fs.coverage);

  // 3. band support of atoms is exact
  {
    HarmonicCoefficients psi = frame_atom(fs, 2, 5);
    double off = 0.0;
    int kmin = 999, kmax = -1;
    for (const auto& [key, blk] : psi.blocks()) {
      const double l = degree_lambda(key.first);
      if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
      kmin = std::min(kmin, key.first);
      kmax = std::max(kmax, key.first);
      if (l < fs.levels[2].band_lo || l > fs.levels[2].band_hi)
        off = std::max(off, blk.cwiseAbs().maxCoeff());
    }
    printf("[3] level-2 atom degrees [%d, %d] (lambda [%g, %g]), off-band %.3e\n",
           kmin, kmax, degree_lambda(kmin), degree_lambda(kmax), off);
    // closed-form evaluation matches spectral synthesis
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Vec3 y(nd(rng), nd(rng), nd(rng));
    y.normalize();
    const Vec3 c5 = std::get<Vec3>(fs.levels[2].lattice.pts[5]);
    printf("[3] atom value closed-form vs spectral: %.3e\n",
           std::fabs(frame_atom_value(fs.levels[2], c5, y) - synthesize_at(psi, y)));
  }

  // 4. Parseval + round trip, 50 random covered f
  {
    std::mt19937_64 rng(11);
    double p_worst = 0.0, rt_worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_real_distribution<double> ud(0.0, 64.0);
      HarmonicCoefficients f = random_s2(trial == 0 ? 64.0 : ud(rng), rng);
      FrameCoefficients fc = frame_analyze(f, fs);
      const double defect =
          std::fabs(fc.squared_sum() - f.squared_norm()) / f.squared_norm();
      p_worst = std::max(p_worst, defect);
      HarmonicCoefficients g = frame_synthesize(fc, fs);
      const double rt =
          linear_combination(1.0, g, -1.0, f).norm() / f.norm();
      rt_worst = std::max(rt_worst, rt);
    }
    printf("[4] Parseval defect worst: %.3e, round-trip worst: %.3e\n", p_worst,
           rt_worst);
  }

  // 5. Y_1 hits only levels 0 and 1
  {
    HarmonicCoefficients f(Manifold::S2, 2.0);
    f.set(1, 2, 1.0);
    FrameCoefficients fc = frame_analyze(f, fs);
    for (std::size_t j = 0; j < fc.level.size(); ++j)
      printf("[5] level %zu coeff norm: %.3e\n", j, fc.level[j].norm());
  }

  // 6. localization profiles
  {
    for (int j = 1; j <= 3; ++j) {
      LocalizationReport rep = localization_profile(fs, j, 3);
      const double nrm2 = frame_atom(fs, j, 3).squared_norm() * fs.levels[j].b[3];
      printf("[6] level %d: center=%.4f sup=%.4f c2=%.4f c4=%.4f c6=%.4f |Psi|=%.4f\n",
             j, rep.center_value, rep.sup_abs, rep.c2, rep.c4, rep.c6,
             std::sqrt(nrm2));
    }
  }

  // 7. discrete representation, J=1 (omega = 3)
  {
    std::mt19937_64 rng(23);
    HarmonicCoefficients f = random_s2(3.0, rng);
    double need = 0.0;
    for (const auto& lv : fs.levels)
      if (lv.band_lo <= 3.0)
        need = std::max(need, product_bandwidth(Manifold::S2, 3.0, lv.band_hi));
    Lattice master = generate_lattice(Manifold::S2, 0.32, false, 5);
    Cubature mc = compute_cubature(master, need);
    printf("[7] master: N=%zu exact to %g (need %g)\n", mc.size(), mc.omega_exact,
           need);
    std::vector<double> samples = synthesize(f, master.pts);
    HarmonicCoefficients g = discrete_frame_representation(samples, mc, fs, 1);
    printf("[7] discrete representation error: %.3e\n",
           linear_combination(1.0, g, -1.0, f).norm() / f.norm());
    // weak master rule must be rejected
    Cubature weak = compute_cubature(master, 6.0);
    try {
      discrete_frame_representation(samples, weak, fs, 1);
      printf("[7] ERROR: weak master accepted\n");
    } catch (const precondition_error& e) {
      printf("[7] weak master rejected: %s\n", e.what());
    }
  }

  // 8. over-coverage rejection
  {
    std::mt19937_64 rng(3);
    HarmonicCoefficients f = random_s2(80.0, rng);
    try {
      frame_analyze(f, fs);
      printf("[8] ERROR: over-coverage accepted\n");
    } catch (const precondition_error& e) {
      printf("[8] over-coverage rejected: %s\n", e.what());
    }
  }

  printf("all frame checks done\n");
  return 0;
}
