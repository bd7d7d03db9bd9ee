// Scratch validation for discretize.hpp. Deleted before release.
#include <chrono>
#include <cstdio>

#include "manirad/discretize.hpp"
#include "manirad/splines.hpp"

using namespace manirad;

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  set_thread_budget(8);
  Rng rng(99);

  const Lattice L = generate_lattice(Manifold::S2, 0.35, false, 3);
  std::printf("lattice N=%zu sep=%.3f cov=%.3f\n", L.pts.size(), L.cert.separation,
              L.cert.covering);

  // 1. omega 0 -> pure Voronoi masses
  {
    const Cubature C0 = compute_cubature(L, 0.0);
    const Eigen::VectorXd vm = detail::voronoi_masses(L);
    std::printf("w0: sum-1 %.2e  max|mu - voronoi| %.2e  min %.2e\n",
                std::fabs(C0.weights.sum() - 1.0), (C0.weights - vm).cwiseAbs().maxCoeff(),
                C0.weights.minCoeff());
  }

  // 2. omega 20 cubature on S2
  {
    const Cubature C = compute_cubature(L, 20.0);
    BasisSlot w;
    const double r20 = cubature_moment_residual(L, C.weights, 20.0, &w);
    const double r30 = cubature_moment_residual(L, C.weights, 30.0, &w);
    std::printf("w20: sum-1 %.2e min %.3e max %.3e resid %.2e  next-shell resid %.2e at %s\n",
                std::fabs(C.weights.sum() - 1.0), C.weights.minCoeff(),
                C.weights.maxCoeff(), r20, r30,
                detail::slot_name(w, Manifold::S2).c_str());

    // discrete fourier round trip, f in E_6
    const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
    std::vector<double> smp(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) smp[i] = synthesize_at(f, C.lattice.pts[i]);
    const HarmonicCoefficients fr = discrete_fourier(smp, C, 6.0);
    std::printf("dft round trip err %.2e\n",
                linear_combination(1.0, fr, -1.0, f).norm());
  }

  // 3. funk-radon discrete inversion on a symmetric lattice
  {
    const Lattice Ls = generate_lattice(Manifold::S2, 0.35, true, 7);
    const Cubature C = compute_cubature(Ls, 20.0);
    HarmonicCoefficients f(Manifold::S2, 6.0);
    const HarmonicCoefficients raw = random_coefficients(Manifold::S2, 6.0, rng);
    for (const auto& [key, blk] : raw.blocks())
      if (key.first % 2 == 0) f.block(key.first) = blk;
    const HarmonicCoefficients g = funk_radon_forward(f);
    std::vector<double> smp(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) smp[i] = synthesize_at(g, C.lattice.pts[i]);
    const HarmonicCoefficients rec = discrete_invert_funk_radon(smp, C, 6.0);
    std::printf("FR discrete inversion err %.2e (N=%zu)\n",
                linear_combination(1.0, rec, -1.0, f).norm(), C.size());

    // kernel input: f = Y_1 -> zero samples -> zero recovery
    HarmonicCoefficients fo(Manifold::S2, 6.0);
    fo.set(1, 2, 1.0);
    const HarmonicCoefficients go = funk_radon_forward(fo);
    std::vector<double> smp0(C.size());
    for (std::size_t i = 0; i < C.size(); ++i)
      smp0[i] = synthesize_at(go, C.lattice.pts[i]);
    const HarmonicCoefficients rec0 = discrete_invert_funk_radon(smp0, C, 6.0);
    std::printf("FR kernel input -> norm %.2e\n", rec0.norm());
  }

  // 4. so3 discrete inversion via product cubature
  {
    const auto t0 = std::chrono::steady_clock::now();
    const Cubature A = compute_cubature(L, 40.0);
    const Lattice Lb = generate_lattice(Manifold::S2, 0.35, false, 17);
    const Cubature B = compute_cubature(Lb, 40.0);
    const Cubature P = product_cubature(A, B);
    std::printf("product cubature N=%zu omega=%.0f\n", P.size(), P.omega_exact);

    const HarmonicCoefficients f = random_coefficients(Manifold::SO3, 6.0, rng);
    const HarmonicCoefficients g = so3_radon_forward(f);
    std::vector<double> smp(P.size());
    parallel_for(P.size(), [&](std::size_t i) {
      smp[i] = synthesize_at(g, P.lattice.pts[i]);
    });
    const HarmonicCoefficients rec = discrete_invert_so3(smp, P, 6.0);
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("SO3 discrete inversion err %.2e  (%lld ms)\n",
                linear_combination(1.0, rec, -1.0, f).norm(),
                (long long)std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                    .count());

    try {
      const Cubature weak = product_cubature(compute_cubature(L, 20.0),
                                             compute_cubature(Lb, 20.0));
      discrete_invert_so3(smp, weak, 6.0);
      std::printf("weak cubature NOT rejected (bug)\n");
    } catch (const precondition_error& e) {
      std::printf("weak cubature rejected: %s\n", e.what());
    }
  }

  // 5. weight brackets on S2
  {
    for (double om : {6.0, 12.0, 20.0}) {
      const double rho = 0.9 / std::sqrt(om);
      const Lattice Lx = generate_lattice(Manifold::S2, rho, false, 23);
      const Cubature C = compute_cubature(Lx, om);
      std::printf("bracket omega=%4.0f rho=%.3f N=%4zu  mu*om in [%.3f, %.3f]\n", om,
                  rho, C.size(), C.weights.minCoeff() * om, C.weights.maxCoeff() * om);
    }
  }

  // 6. infeasible: too many moments for the point count
  {
    const Lattice Lc = generate_lattice(Manifold::S2, 0.8, false, 5);
    try {
      compute_cubature(Lc, 90.0);
      std::printf("infeasible case NOT rejected (bug)\n");
    } catch (const certification_error& e) {
      std::printf("infeasible rejected: %s\n", e.what());
    }
  }
  return 0;
}
