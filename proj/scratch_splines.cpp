// Scratch validation for splines.hpp. Deleted before release.
#include <chrono>
#include <cstdio>
#include <vector>

#include "manirad/splines.hpp"

using namespace manirad;

// Slot-sum Gram oracle: enumerate every basis slot of the shared truncation,
// apply each functional to the unit coefficient object, accumulate
// sum_slots w * F_a * F_b. Independent of the closed forms in assemble_gram.
static Eigen::MatrixXd gram_oracle(const FunctionalSet& fs, double t, int K, double a) {
  const Manifold m = fs.manifold;
  const std::size_t N = fs.size();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  auto add_slot = [&](HarmonicCoefficients& unit, double lam) {
    const double w = std::pow(1.0 + a * lam, -t);
    Eigen::VectorXd F(N);
    for (std::size_t i = 0; i < N; ++i) F[i] = functional_apply(fs.items[i], unit);
    G += w * (F * F.transpose());
  };
  if (m == Manifold::S2) {
    for (int k = 0; k <= K; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i) {
        HarmonicCoefficients c(m, degree_lambda(K));
        c.set(k, i, 1.0);
        add_slot(c, degree_lambda(k));
      }
  } else if (m == Manifold::SO3) {
    for (int k = 0; k <= K; ++k)
      for (int i = 1; i <= 2 * k + 1; ++i)
        for (int j = 1; j <= 2 * k + 1; ++j) {
          HarmonicCoefficients c(m, degree_lambda(K));
          c.set(k, i, j, 1.0);
          add_slot(c, degree_lambda(k));
        }
  } else {
    for (int k1 = 0; k1 <= K; ++k1)
      for (int k2 = 0; k2 + k1 <= K; ++k2)
        for (int i = 1; i <= 2 * k1 + 1; ++i)
          for (int j = 1; j <= 2 * k2 + 1; ++j) {
            HarmonicCoefficients c(m, degree_lambda(K));
            c.set(k1, i, k2, j, 1.0);
            add_slot(c, degree_lambda(k1) + degree_lambda(k2));
          }
  }
  return G;
}

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  Rng rng(20240817);

  // --- 1. dual-route Gram on S2, mixed kinds ---
  {
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    for (int i = 0; i < 3; ++i) fs.items.push_back(PointEvalF{Point(rng.sphere_point())});
    fs.items.push_back(SymPointPairF{rng.sphere_point()});
    fs.items.push_back(CircleIntegralF{great_circle(rng.sphere_point())});
    fs.items.push_back(HemisphereIntegralF{rng.sphere_point()});
    const double t = 1.8, a = sobolev_scale(Manifold::S2);
    const int K = 10;
    const Eigen::MatrixXd B = assemble_gram(fs, t, K, a);
    const Eigen::MatrixXd G = gram_oracle(fs, t, K, a);
    std::printf("S2 gram dual-route max err  %.3e  (scale %.3e)\n",
                (B - G).cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  }

  // --- 2. dual-route Gram on SO3, points + circles ---
  {
    FunctionalSet fs;
    fs.manifold = Manifold::SO3;
    for (int i = 0; i < 3; ++i)
      fs.items.push_back(PointEvalF{Point(rng.rotation_point())});
    fs.items.push_back(SO3CircleIntegralF{rng.sphere_point(), rng.sphere_point()});
    fs.items.push_back(SO3CircleIntegralF{rng.sphere_point(), rng.sphere_point()});
    const double t = 2.2, a = sobolev_scale(Manifold::SO3);
    const int K = 8;
    const Eigen::MatrixXd B = assemble_gram(fs, t, K, a);
    const Eigen::MatrixXd G = gram_oracle(fs, t, K, a);
    std::printf("SO3 gram dual-route max err %.3e  (scale %.3e)\n",
                (B - G).cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  }

  // --- 3. dual-route Gram on S2xS2 (triangle truncation) ---
  {
    FunctionalSet fs;
    fs.manifold = Manifold::S2xS2;
    for (int i = 0; i < 4; ++i)
      fs.items.push_back(PointEvalF{Point(ProductPoint{rng.sphere_point(), rng.sphere_point()})});
    const double t = 2.6, a = sobolev_scale(Manifold::S2xS2);
    const int K = 6;
    const Eigen::MatrixXd B = assemble_gram(fs, t, K, a);
    const Eigen::MatrixXd G = gram_oracle(fs, t, K, a);
    std::printf("S2xS2 gram dual-route err   %.3e  (scale %.3e)\n",
                (B - G).cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  }

  // --- 4. single-point spline equals normalized kernel section ---
  {
    const Vec3 x = rng.sphere_point();
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    fs.items.push_back(PointEvalF{Point(x)});
    Eigen::VectorXd v(1);
    v[0] = 1.0;
    const double t = 2.0;
    const Spline s = solve_spline(fs, v, t);
    const Vec3 y = rng.sphere_point();
    const auto P = legendre_all(s.kmax, x.dot(y));
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= s.kmax; ++k) {
      const double w = std::pow(1.0 + degree_lambda(k), -t);
      num += w * (2.0 * k + 1.0) * P[k];
      den += w * (2.0 * k + 1.0);
    }
    const double sy = synthesize_at(s.coefficients, Point(y));
    std::printf("single-point kernel ratio   %.3e  (K=%d tail %.1e)\n",
                std::fabs(sy - num / den), s.kmax, s.diag.tail_ratio);
  }

  // --- 5. interpolation exactness, mixed kinds, random target ---
  {
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    for (int i = 0; i < 6; ++i) fs.items.push_back(PointEvalF{Point(rng.sphere_point())});
    for (int i = 0; i < 3; ++i) fs.items.push_back(CircleIntegralF{great_circle(rng.sphere_point())});
    for (int i = 0; i < 3; ++i) fs.items.push_back(HemisphereIntegralF{rng.sphere_point()});
    const HarmonicCoefficients f = random_coefficients(Manifold::S2, degree_lambda(6), rng);
    const Spline s = interpolate_function(f, fs, 1.7);
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i)
      worst = std::max(worst, std::fabs(functional_apply(fs.items[i], s.coefficients) - s.values[i]));
    std::printf("interp residual (reapplied) %.3e  solver resid %.3e cond %.2e\n",
                worst, s.diag.residual_inf, s.diag.cond_estimate);

    Rng rng2(7);
    const OptimalityReport rep = optimality_check(s, f, 5, rng2);
    std::printf("orth defect %.3e  norm deficit %.3e  minimal=%d diam %.3e center %.3e\n",
                rep.max_orthogonality_defect, rep.max_norm_deficit, (int)rep.minimal,
                rep.empirical_diameter, rep.max_center_distance);
  }

  // --- 6. sympair spline of even data: only even blocks, matches full
  //        antipodal point interpolation ---
  {
    std::vector<Vec3> base;
    for (int i = 0; i < 5; ++i) base.push_back(rng.sphere_point());
    HarmonicCoefficients f(Manifold::S2, degree_lambda(6));
    const HarmonicCoefficients raw = random_coefficients(Manifold::S2, degree_lambda(6), rng);
    for (const auto& [key, blk] : raw.blocks())
      if (key.first % 2 == 0) f.block(key.first) = blk;  // even target

    FunctionalSet pairs;
    pairs.manifold = Manifold::S2;
    Eigen::VectorXd vp(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      pairs.items.push_back(SymPointPairF{base[i]});
      vp[i] = 2.0 * synthesize_at(f, Point(base[i]));
    }
    const double tau = 3.0;
    const Spline sp = solve_spline(pairs, vp, tau);
    int odd_blocks = 0;
    for (const auto& [key, blk] : sp.coefficients.blocks())
      if (key.first % 2 == 1) ++odd_blocks;

    FunctionalSet pts;
    pts.manifold = Manifold::S2;
    Eigen::VectorXd vv(2 * base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      pts.items.push_back(PointEvalF{Point(base[i])});
      pts.items.push_back(PointEvalF{Point(Vec3(-base[i]))});
      vv[2 * i] = vv[2 * i + 1] = synthesize_at(f, Point(base[i]));
    }
    const Spline sf = solve_spline(pts, vv, tau);
    const double diff =
        linear_combination(1.0, sp.coefficients, -1.0, sf.coefficients).norm();
    std::printf("sympair: odd blocks %d, vs full antipodal interp %.3e\n", odd_blocks, diff);
  }

  // --- 7. funk-radon spline inversion end to end ---
  {
    const auto t0 = std::chrono::steady_clock::now();
    HarmonicCoefficients f(Manifold::S2, degree_lambda(4));
    const HarmonicCoefficients raw = random_coefficients(Manifold::S2, degree_lambda(4), rng);
    for (const auto& [key, blk] : raw.blocks())
      if (key.first % 2 == 0) f.block(key.first) = blk;
    const HarmonicCoefficients g = funk_radon_forward(f);

    const Lattice L = generate_lattice(Manifold::S2, 0.35, true, 11);
    std::vector<Vec3> pts;
    std::vector<double> vals;
    for (const Point& p : L.pts) {
      pts.push_back(std::get<Vec3>(p));
      vals.push_back(synthesize_at(g, p));
    }
    for (int l = 0; l <= 2; ++l) {
      const HarmonicCoefficients rec = spline_inversion_funk_radon(pts, vals, 1.5, l);
      const double err = linear_combination(1.0, rec, -1.0, f).norm() / f.norm();
      std::printf("FR inversion l=%d  N=%zu  rel err %.3e\n", l, pts.size(), err);
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("FR inversion block took %lld ms\n",
                (long long)std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  }

  // --- 8. so3 radon spline inversion end to end ---
  {
    const auto t0 = std::chrono::steady_clock::now();
    const HarmonicCoefficients f = random_coefficients(Manifold::SO3, degree_lambda(2), rng);
    const HarmonicCoefficients g = so3_radon_forward(f);
    std::vector<ProductPoint> pts;
    std::vector<double> vals;
    for (int i = 0; i < 260; ++i) {
      const ProductPoint p{rng.sphere_point(), rng.sphere_point()};
      pts.push_back(p);
      vals.push_back(synthesize_at(g, Point(p)));
    }
    for (int l = 0; l <= 1; ++l) {
      const HarmonicCoefficients rec = spline_inversion_so3(pts, vals, 2.5, l);
      const double err = linear_combination(1.0, rec, -1.0, f).norm() / f.norm();
      std::printf("SO3 inversion l=%d N=%zu rel err %.3e\n", l, pts.size(), err);
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::printf("SO3 inversion block took %lld ms\n",
                (long long)std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  }

  // --- 9. choose_kmax behavior ---
  {
    double r1 = 0, r2 = 0, r3 = 0;
    const int k1 = choose_kmax(Manifold::S2, 1.5, -1, &r1);
    const int k2 = choose_kmax(Manifold::SO3, 2.5, -1, &r2);
    const int k3 = choose_kmax(Manifold::S2xS2, 2.5, -1, &r3);
    std::printf("kmax: S2 t=1.5 -> %d (%.1e)  SO3 t=2.5 -> %d (%.1e)  S2xS2 t=2.5 -> %d (%.1e)\n",
                k1, r1, k2, r2, k3, r3);
    double r4 = 0;
    const int k4 = choose_kmax(Manifold::S2, 9.5, -1, &r4);
    std::printf("kmax: S2 t=9.5 -> %d (%.1e)\n", k4, r4);
  }
  return 0;
}
