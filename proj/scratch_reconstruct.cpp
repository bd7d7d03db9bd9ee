#include <cstdio>
#include <random>

#include "manirad/reconstruct.hpp"

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
  std::mt19937_64 rng(5);

  // 1. approximation operator: constants exact, Y_1 contraction, rho-monotone
  {
    Lattice L = generate_lattice(Manifold::S2, 0.2, false, 2);
    HarmonicCoefficients one(Manifold::S2, 6.0);
    one.set(0, 1, 2.5);
    std::vector<double> s(L.size(), 2.5);
    HarmonicCoefficients a = voronoi_approximation(s, L, 6.0);
    printf("[1] constant defect: %.3e\n",
           linear_combination(1.0, a, -1.0, one).norm());
    HarmonicCoefficients y1(Manifold::S2, 6.0);
    y1.set(1, 2, 1.0);
    for (double rho : {0.3, 0.2, 0.15, 0.1}) {
      Lattice Lr = generate_lattice(Manifold::S2, rho, false, 3);
      std::vector<double> sy = synthesize(y1, Lr.pts);
      HarmonicCoefficients ay = voronoi_approximation(sy, Lr, 6.0);
      printf("[1] rho=%.2f N=%zu |f-Af|/|f| = %.4f\n", rho, Lr.size(),
             linear_combination(1.0, ay, -1.0, y1).norm());
    }
  }

  // 2. iterative reconstruction on E_6 (fast) and E_30 (long trace)
  {
    HarmonicCoefficients f = random_s2(6.0, rng);
    Lattice L = generate_lattice(Manifold::S2, 0.15, false, 7);
    std::vector<double> s = synthesize(f, L.pts);
    auto [g, tr] = iterative_reconstruct(s, L, 6.0, 1e-9, 200, &f);
    printf("[2] steps=%d converged=%d contraction=%.4f final err=%.3e true err=%.3e\n",
           tr.steps, tr.converged, tr.contraction, tr.errors.back(),
           linear_combination(1.0, g, -1.0, f).norm());
    HarmonicCoefficients f30 = random_s2(30.0, rng);
    Lattice L30 = generate_lattice(Manifold::S2, 0.5, false, 7);
    std::vector<double> s30 = synthesize(f30, L30.pts);
    auto [g30, tr30] = iterative_reconstruct(s30, L30, 30.0, 1e-11, 200, &f30);
    printf("[2] E_30 rho=0.5 N=%zu: steps=%d contraction=%.4f true err=%.3e\n",
           L30.size(), tr30.steps, tr30.contraction,
           linear_combination(1.0, g30, -1.0, f30).norm());
    // slope stability after step 3
    double rmin = 1e9, rmax = 0.0;
    for (std::size_t i = 4; i < tr30.errors.size(); ++i) {
      if (tr30.errors[i] < tr30.errors.front() * 1e-12) break;
      const double r = tr30.errors[i] / tr30.errors[i - 1];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    printf("[2] E_30 ratio range after step 3: [%.4f, %.4f] spread %.2f%%\n", rmin,
           rmax, 100.0 * (rmax - rmin) / tr30.contraction);
    // f = 0
    std::vector<double> z(L.size(), 0.0);
    auto [gz, trz] = iterative_reconstruct(z, L, 6.0, 1e-9, 50);
    printf("[2] zero input: steps=%d converged=%d norm=%.3e\n", trz.steps,
           trz.converged, gz.norm());
    // sparse lattice divergence
    Lattice Ls = generate_lattice(Manifold::S2, 0.8, false, 11);
    HarmonicCoefficients fh = random_s2(42.0, rng);
    std::vector<double> sh = synthesize(fh, Ls.pts);
    try {
      iterative_reconstruct(sh, Ls, 42.0, 1e-9, 100);
      printf("[2] ERROR: sparse lattice did not diverge\n");
    } catch (const certification_error& e) {
      printf("[2] sparse lattice rejected: %s\n", e.what());
    }
  }

  // 3. Plancherel-Polya bounds
  {
    Lattice L0 = generate_lattice(Manifold::S2, 0.25, false, 13);
    auto [a0, b0] = pp_frame_bounds(L0, 0.0);
    printf("[3] omega=0: A=%.6f B=%.6f rho^2*N=%.6f\n", a0, b0,
           L0.rho * L0.rho * L0.size());
    for (double rho : {0.3, 0.2, 0.12}) {
      Lattice L = generate_lattice(Manifold::S2, rho, false, 17);
      auto [A, B] = pp_frame_bounds(L, 6.0);
      printf("[3] rho=%.2f: A=%.4f B=%.4f B/A=%.4f eta=%.4f\n", rho, A, B, B / A,
             (B - A) / (A + B));
    }
    Lattice Lw = generate_lattice(Manifold::S2, 0.9, false, 19);
    try {
      pp_frame_bounds(Lw, 42.0);  // dim 49 > N
      printf("[3] ERROR: rank-deficient sampling accepted\n");
    } catch (const certification_error& e) {
      printf("[3] deficient sampling rejected: %s\n", e.what());
    }
  }

  // 4. frame algorithm
  {
    HarmonicCoefficients f = random_s2(6.0, rng);
    Lattice L = generate_lattice(Manifold::S2, 0.12, false, 23);
    std::vector<double> proj = synthesize(f, L.pts);
    auto [g, tr] = frame_algorithm(proj, L, 6.0, std::nullopt, 1e-10, 300, &f);
    printf("[4] default gamma: steps=%d converged=%d ratio=%.4f eta=%.4f err=%.3e\n",
           tr.steps, tr.converged, tr.contraction, tr.bound,
           linear_combination(1.0, g, -1.0, f).norm());
    auto [A, B] = pp_frame_bounds(L, 6.0);
    auto [g2, tr2] = frame_algorithm(proj, L, 6.0, 1.0 / B, 1e-10, 300, &f);
    printf("[4] gamma=1/B: steps=%d (default %d)\n", tr2.steps, tr.steps);
    // in-space atom recovered
    HarmonicCoefficients psi = detail::slots_to_harmonics(
        BasisSet::bandlimited(Manifold::S2, 6.0),
        detail::moment_matrix(BasisSet::bandlimited(Manifold::S2, 6.0), L.pts).col(4) *
            3.0,
        Manifold::S2, 6.0);
    std::vector<double> pp = synthesize(psi, L.pts);
    auto [gp, trp] = frame_algorithm(pp, L, 6.0, std::nullopt, 1e-10, 300);
    printf("[4] atom recovery err=%.3e steps=%d\n",
           linear_combination(1.0, gp, -1.0, psi).norm(), trp.steps);
    try {
      frame_algorithm(proj, L, 6.0, 2.5 / B, 1e-10, 300);
      printf("[4] ERROR: bad gamma accepted\n");
    } catch (const precondition_error& e) {
      printf("[4] bad gamma rejected: %s\n", e.what());
    }
  }

  // 5. agreement with direct discrete inversion
  {
    HarmonicCoefficients f = random_s2(6.0, rng);
    Lattice L = generate_lattice(Manifold::S2, 0.15, false, 29);
    std::vector<double> s = synthesize(f, L.pts);
    auto [gi, ti] = iterative_reconstruct(s, L, 6.0, 1e-10, 200);
    auto [gf, tf2] = frame_algorithm(s, L, 6.0, std::nullopt, 1e-10, 300);
    Cubature C = compute_cubature(L, product_bandwidth(Manifold::S2, 6.0, 6.0));
    HarmonicCoefficients gd = discrete_fourier(s, C, 6.0);
    printf("[5] iter vs direct: %.3e, frame vs direct: %.3e\n",
           linear_combination(1.0, gi, -1.0, gd).norm(),
           linear_combination(1.0, gf, -1.0, gd).norm());
  }

  printf("all reconstruct checks done\n");
  return 0;
}
