#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "manirad/io.hpp"

using namespace manirad;

static std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int main() {
  setvbuf(stdout, nullptr, _IONBF, 0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;

  // 1. MRCOEF round trips on all three manifolds
  {
    HarmonicCoefficients s2(Manifold::S2, 12.0);
    for (int k = 0; k <= 3; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i) s2.set(k, i, nd(rng));
    write_coefficients("/tmp/io_s2.mrcoef", s2);
    HarmonicCoefficients r = read_coefficients("/tmp/io_s2.mrcoef");
    printf("[1] S2 round trip: %.3e omega=%g\n",
           linear_combination(1.0, r, -1.0, s2).norm(), r.omega());

    HarmonicCoefficients so3(Manifold::SO3, 6.0);
    for (int k = 0; k <= 2; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i)
        for (int j = 1; j <= 2 * k + 1; ++j) so3.set(k, i, j, nd(rng));
    write_coefficients("/tmp/io_so3.mrcoef", so3);
    HarmonicCoefficients r3 = read_coefficients("/tmp/io_so3.mrcoef");
    printf("[1] SO3 round trip: %.3e\n", linear_combination(1.0, r3, -1.0, so3).norm());

    HarmonicCoefficients pp(Manifold::S2xS2, 8.0);
    pp.set(1, 2, 1, 3, 0.5);
    pp.set(2, 1, 0, 1, -2.0);
    write_coefficients("/tmp/io_pp.mrcoef", pp);
    HarmonicCoefficients rp = read_coefficients("/tmp/io_pp.mrcoef");
    printf("[1] S2xS2 round trip: %.3e\n", linear_combination(1.0, rp, -1.0, pp).norm());

    // duplicate rejection
    std::ofstream bad("/tmp/io_bad.mrcoef");
    bad << "MRCOEF v1 manifold=S2 omega=6\n1 2 0.5\n1 2 0.75\n";
    bad.close();
    try {
      read_coefficients("/tmp/io_bad.mrcoef");
      printf("[1] ERROR: duplicate accepted\n");
    } catch (const io_error& e) {
      printf("[1] duplicate rejected: %s\n", e.what());
    }
    // over-bandwidth rejection
    std::ofstream ob("/tmp/io_ob.mrcoef");
    ob << "MRCOEF v1 manifold=S2 omega=6\n5 1 0.5\n";
    ob.close();
    try {
      read_coefficients("/tmp/io_ob.mrcoef");
      printf("[1] ERROR: over-bandwidth accepted\n");
    } catch (const io_error& e) {
      printf("[1] over-bandwidth rejected: %s\n", e.what());
    }
  }

  // 2. MRLAT round trips + verification
  {
    for (auto m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
      Lattice L = generate_lattice(m, m == Manifold::S2 ? 0.3 : 1.3, false, 9);
      const std::string p = "/tmp/io_lat_" + ioutil::manifold_name(m) + ".mrlat";
      write_lattice(p, L);
      Lattice R = read_lattice(p, true);
      double worst = 0.0;
      for (std::size_t i = 0; i < L.size(); ++i)
        worst = std::max(worst, geodesic_distance(L.pts[i], R.pts[i]));
      printf("[2] %s: N=%zu coord defect %.3e sep %.4f (orig %.4f) cov %.4f\n",
             ioutil::manifold_name(m).c_str(), R.size(), worst,
             R.cert.separation, L.cert.separation, R.cert.covering);
    }
    Lattice Ls = generate_lattice(Manifold::S2, 0.4, true, 9);
    write_lattice("/tmp/io_lat_sym.mrlat", Ls);
    Lattice Rs = read_lattice("/tmp/io_lat_sym.mrlat", false);
    printf("[2] symmetric flag survives: %d\n", Rs.symmetric ? 1 : 0);
  }

  // 3. MRSPL round trip (mixed S2 + SO3 problems)
  {
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    fs.items.push_back(PointEvalF{Point(Vec3::UnitZ())});
    fs.items.push_back(SymPointPairF{Vec3::UnitX()});
    fs.items.push_back(CircleIntegralF{great_circle(Vec3::UnitY())});
    fs.items.push_back(HemisphereIntegralF{Vec3(0.6, 0.0, 0.8)});
    std::vector<double> vals = {1.0, -0.5, 0.25, 2.0};
    write_spline_problem("/tmp/io_sp.mrspl", fs, vals, 1.5);
    SplineProblem sp = read_spline_problem("/tmp/io_sp.mrspl");
    printf("[3] S2 spline problem: %zu functionals t=%g v3=%g\n",
           sp.functionals.items.size(), sp.t, sp.values[3]);

    FunctionalSet f3;
    f3.manifold = Manifold::SO3;
    f3.items.push_back(PointEvalF{Point(RotationPoint{0.3, 1.1, -0.4})});
    f3.items.push_back(SO3CircleIntegralF{Vec3::UnitZ(), Vec3::UnitX()});
    write_spline_problem("/tmp/io_sp3.mrspl", f3, {0.5, 0.75}, 2.5);
    SplineProblem sp3 = read_spline_problem("/tmp/io_sp3.mrspl");
    printf("[3] SO3 spline problem: %zu functionals manifold=%s\n",
           sp3.functionals.items.size(),
           ioutil::manifold_name(sp3.functionals.manifold).c_str());
  }

  // 4. MRCUB round trip + verification honest/negative
  {
    Lattice L = generate_lattice(Manifold::S2, 0.35, false, 4);
    Cubature C = compute_cubature(L, 20.0);
    write_cubature("/tmp/io_cub.mrcub", C);
    Cubature R = read_cubature("/tmp/io_cub.mrcub", true);
    printf("[4] cubature: N=%zu omega=%g wdiff=%.3e resid=%.2e\n", R.size(),
           R.omega_exact, (R.weights - C.weights).cwiseAbs().maxCoeff(), R.residual);
    // forged certificate must fail verification
    Cubature forged = C;
    forged.omega_exact = 90.0;
    write_cubature("/tmp/io_forged.mrcub", forged);
    try {
      read_cubature("/tmp/io_forged.mrcub", true);
      printf("[4] ERROR: forged certificate passed\n");
    } catch (const certification_error& e) {
      printf("[4] forged certificate rejected: %s\n", e.what());
    }
  }

  // 5. MRFRM round trip
  {
    FrameSystem fs = build_frame(2);
    write_frame("/tmp/io_frame.mrfrm", fs);
    FrameSystem r = read_frame("/tmp/io_frame.mrfrm", false);
    printf("[5] frame: levels=%zu atoms=%zu (orig %zu) coverage=%g\n",
           r.levels.size(), r.atom_count(), fs.atom_count(), r.coverage);
    HarmonicCoefficients f(Manifold::S2, 12.0);
    for (int k = 0; k <= 3; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i) f.set(k, i, nd(rng));
    FrameCoefficients ca = frame_analyze(f, fs), cb = frame_analyze(f, r);
    double d = 0.0;
    for (std::size_t j = 0; j < ca.level.size(); ++j)
      d = std::max(d, (ca.level[j] - cb.level[j]).cwiseAbs().maxCoeff());
    printf("[5] analyze agreement across io: %.3e\n", d);
  }

  // 6. determinism: writing twice gives identical bytes
  {
    Lattice L = generate_lattice(Manifold::S2, 0.4, false, 77);
    write_lattice("/tmp/io_det1.mrlat", L);
    write_lattice("/tmp/io_det2.mrlat", L);
    printf("[6] byte-identical rewrite: %d\n",
           slurp("/tmp/io_det1.mrlat") == slurp("/tmp/io_det2.mrlat") ? 1 : 0);
  }

  printf("all io checks done\n");
  return 0;
}
