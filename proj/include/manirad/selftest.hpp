#pragma once

// Acceptance suite: nine end-to-end checks covering the whole library, each
// printing one pass/fail line. Tolerances are pinned; quantities that have no
// closed form (regression errors, weight brackets, lattice cardinality) are
// frozen from the exact configurations coded here. A failure means behaviour
// drifted, and the fix is to find the regression, not to widen a window.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "manirad/core.hpp"
#include "manirad/discretize.hpp"
#include "manirad/frames.hpp"
#include "manirad/geometry.hpp"
#include "manirad/harmonics.hpp"
#include "manirad/reconstruct.hpp"
#include "manirad/spaces.hpp"
#include "manirad/splines.hpp"
#include "manirad/transforms.hpp"

namespace manirad {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

namespace selftest_detail {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

inline double rel_gap(const HarmonicCoefficients& a, const HarmonicCoefficients& b) {
  return linear_combination(1.0, a, -1.0, b).norm() / b.norm();
}

inline double max_abs_coeff(const HarmonicCoefficients& c) {
  double m = 0.0;
  for (const auto& [key, blk] : c.blocks())
    m = std::max(m, blk.cwiseAbs().maxCoeff());
  return m;
}

inline bool within(double value, double frozen, double rel_tol) {
  return std::fabs(value - frozen) <= rel_tol * std::fabs(frozen);
}

}  // namespace selftest_detail

// 1. Great-circle means of every Y_k^i, k <= 12, computed by geometric
//    quadrature and compared against the multiplier table; odd degrees must
//    be annihilated.
inline CriterionResult criterion_multipliers() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{1, "circle means of Y_k vs multiplier table"};

  const int kmax = 12, q = 256;
  const MultiplierTable tab = funk_radon_multipliers(kmax);
  Rng rng(101);
  std::vector<Vec3> poles;
  for (int p = 0; p < 3; ++p) poles.push_back(rng.sphere_point());

  double worst_even = 0.0, worst_odd = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const double scale = std::sqrt(2.0 * k + 1.0);  // sup bound for |Y_k^i|
    for (int i = 1; i <= 2 * k + 1; ++i) {
      HarmonicCoefficients e(Manifold::S2, degree_lambda(k));
      e.set(k, i, 1.0);
      const auto f = [&](const Vec3& x) { return synthesize_at(e, Point(x)); };
      for (const Vec3& pole : poles) {
        const double geo = funk_radon_geometric(f, great_circle(pole), q);
        if (k % 2 == 1) {
          worst_odd = std::max(worst_odd, std::fabs(geo) / scale);
        } else {
          const double want = tab.entry(k) * synthesize_at(e, Point(pole));
          worst_even = std::max(
              worst_even, std::fabs(geo - want) / (std::fabs(tab.entry(k)) * scale));
        }
      }
    }
  }

  r.passed = worst_even < 1e-9 && worst_odd < 1e-13;
  r.detail = "even rel " + fmt(worst_even) + ", odd " + fmt(worst_odd) +
             " (k <= 12, q = 256)";
  r.seconds = tm.seconds();
  return r;
}

// 2. inverse(forward(f)) = f on the admissible subspace of each transform,
//    omega <= 30, max coefficient error < 1e-12.
inline CriterionResult criterion_round_trips() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{2, "transform round trips, omega <= 30"};

  Rng rng(202);
  const double omega = 30.0;

  HarmonicCoefficients even_f(Manifold::S2, omega);
  HarmonicCoefficients hemi_f(Manifold::S2, omega);
  {
    const HarmonicCoefficients raw = random_coefficients(Manifold::S2, omega, rng);
    for (const auto& [key, blk] : raw.blocks()) {
      if (key.first % 2 == 0) even_f.block(key.first) = blk;
      if (key.first % 2 == 1) hemi_f.block(key.first) = blk;
    }
  }
  const HarmonicCoefficients so3_f = random_coefficients(Manifold::SO3, omega, rng);

  const double e_fr =
      max_abs_coeff(linear_combination(1.0, funk_radon_inverse(funk_radon_forward(even_f)),
                                       -1.0, even_f));
  const double e_he = max_abs_coeff(linear_combination(
      1.0, hemispherical_inverse(hemispherical_forward(hemi_f)), -1.0, hemi_f));
  const double e_so = max_abs_coeff(linear_combination(
      1.0, so3_radon_inverse(so3_radon_forward(so3_f)), -1.0, so3_f));

  const double tol = 1e-12;
  r.passed = e_fr < tol && e_he < tol && e_so < tol;
  r.detail = "funk-radon " + fmt(e_fr) + ", hemispherical " + fmt(e_he) +
             ", so3 " + fmt(e_so);
  r.seconds = tm.seconds();
  return r;
}

// 3. Reconstruction from lattice samples of the transform: every even basis
//    function with k(k+1) <= 12 on S2, every T_k^{ij} with k(k+1) <= 6 on
//    SO(3), recovered within 1e-8.
inline CriterionResult criterion_discrete_inversion() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{3, "discrete inversion from lattice samples"};

  const double tol = 1e-8;
  double worst_s2 = 0.0, worst_so3 = 0.0;

  {
    const double omega = 12.0;  // images of degree 0 and 2
    const Lattice L = generate_lattice(Manifold::S2, 0.14, false, 31);
    const Cubature C =
        compute_cubature(L, product_bandwidth(Manifold::S2, omega, omega));
    for (int k = 0; k <= 3; k += 2) {
      for (int i = 1; i <= 2 * k + 1; ++i) {
        HarmonicCoefficients e(Manifold::S2, omega);
        e.set(k, i, 1.0);
        const HarmonicCoefficients g = funk_radon_forward(e);
        std::vector<double> samples(C.size());
        for (std::size_t s = 0; s < C.size(); ++s)
          samples[s] = synthesize_at(g, C.lattice.pts[s]);
        const HarmonicCoefficients rec = discrete_invert_funk_radon(samples, C, omega);
        worst_s2 = std::max(worst_s2,
                            max_abs_coeff(linear_combination(1.0, rec, -1.0, e)));
      }
    }
  }

  {
    const double omega = 6.0;  // degrees 0, 1, 2
    const int K = max_degree_for(omega);
    const Lattice Lf = generate_lattice(Manifold::S2, 0.35, false, 33);
    const Cubature Cf = compute_cubature(Lf, 2.0 * degree_lambda(2 * K));
    const Cubature Cp = product_cubature(Cf, Cf);
    for (int k = 0; k <= K; ++k) {
      for (int i = 1; i <= 2 * k + 1; ++i) {
        for (int j = 1; j <= 2 * k + 1; ++j) {
          HarmonicCoefficients e(Manifold::SO3, omega);
          e.set(k, i, j, 1.0);
          const HarmonicCoefficients g = so3_radon_forward(e);
          std::vector<double> samples(Cp.size());
          for (std::size_t s = 0; s < Cp.size(); ++s)
            samples[s] = synthesize_at(g, Cp.lattice.pts[s]);
          const HarmonicCoefficients rec = discrete_invert_so3(samples, Cp, omega);
          worst_so3 = std::max(worst_so3,
                               max_abs_coeff(linear_combination(1.0, rec, -1.0, e)));
        }
      }
    }
  }

  r.passed = worst_s2 < tol && worst_so3 < tol;
  r.detail = "s2 max " + fmt(worst_s2) + " (6 functions), so3 max " + fmt(worst_so3) +
             " (35 functions)";
  r.seconds = tm.seconds();
  return r;
}

// 4. A mixed 50-functional spline interpolates within 1e-9 and is the
//    minimal-norm interpolant in 100/100 random perturbation trials.
inline CriterionResult criterion_spline_interpolation() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{4, "spline residuals and minimal norm"};

  Rng rng(404);
  FunctionalSet fs;
  fs.manifold = Manifold::S2;
  for (int i = 0; i < 20; ++i) fs.items.push_back(PointEvalF{Point(rng.sphere_point())});
  for (int i = 0; i < 10; ++i) fs.items.push_back(SymPointPairF{rng.sphere_point()});
  for (int i = 0; i < 10; ++i)
    fs.items.push_back(CircleIntegralF{great_circle(rng.sphere_point())});
  for (int i = 0; i < 10; ++i) fs.items.push_back(HemisphereIntegralF{rng.sphere_point()});

  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 20.0, rng);
  Eigen::VectorXd v(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = functional_apply(fs.items[i], f);

  const Spline s = solve_spline(fs, v, 1.5);
  double resid = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i)
    resid = std::max(resid, std::fabs(functional_apply(fs.items[i], s.coefficients) -
                                      v[static_cast<Eigen::Index>(i)]));
  resid /= std::max(1.0, v.cwiseAbs().maxCoeff());

  const OptimalityReport rep = optimality_check(s, f, 100, rng);

  r.passed = resid < 1e-9 && rep.trials == 100 && rep.minimal;
  r.detail = "residual " + fmt(resid) + ", minimal in " + std::to_string(rep.trials) +
             "/100 trials, orthogonality defect " + fmt(rep.max_orthogonality_defect);
  r.seconds = tm.seconds();
  return r;
}

// 5. Convergence rates. Interpolating a fixed f in E_6 from lattices of
//    density 0.4 / 0.2 / 0.1 with an H_2 spline must show a log-log slope of
//    at least 3.5, and the multiscale circle-mean inversion error must fall
//    strictly across levels 0, 1, 2. Errors are also frozen at the values
//    this configuration produced when it was first run, with 20% slack.
inline CriterionResult criterion_spline_convergence() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{5, "spline convergence rates"};

  Rng rng(505);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 6.0, rng);
  const double rhos[3] = {0.4, 0.2, 0.1};
  double interp_err[3] = {0.0, 0.0, 0.0};
  for (int idx = 0; idx < 3; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, 11 + idx);
    FunctionalSet fs;
    fs.manifold = Manifold::S2;
    Eigen::VectorXd v(static_cast<Eigen::Index>(L.size()));
    for (std::size_t i = 0; i < L.size(); ++i) {
      fs.items.push_back(PointEvalF{L.pts[i]});
      v[static_cast<Eigen::Index>(i)] = synthesize_at(f, L.pts[i]);
    }
    const Spline s = solve_spline(fs, v, 2.0);
    interp_err[idx] = rel_gap(s.coefficients, f);
  }
  const double slope =
      std::log(interp_err[0] / interp_err[2]) / std::log(rhos[0] / rhos[2]);

  Rng rng2(55);
  HarmonicCoefficients g(Manifold::S2, degree_lambda(4));
  {
    const HarmonicCoefficients raw =
        random_coefficients(Manifold::S2, degree_lambda(4), rng2);
    for (const auto& [key, blk] : raw.blocks())
      if (key.first % 2 == 0) g.block(key.first) = blk;
  }
  const HarmonicCoefficients gt = funk_radon_forward(g);
  const Lattice L = generate_lattice(Manifold::S2, 0.35, true, 11);
  std::vector<Vec3> pts;
  std::vector<double> vals;
  for (const Point& p : L.pts) {
    pts.push_back(std::get<Vec3>(p));
    vals.push_back(synthesize_at(gt, p));
  }
  double inv_err[3] = {0.0, 0.0, 0.0};
  for (int l = 0; l <= 2; ++l) {
    const HarmonicCoefficients rec = spline_inversion_funk_radon(pts, vals, 1.5, l);
    inv_err[l] = rel_gap(rec, g);
  }

  // frozen reference values for the exact seeds and lattices above
  const double frozen_interp[3] = {8.60e-04, 5.18e-05, 3.02e-06};
  const double frozen_inv[3] = {3.07e-05, 2.49e-07, 3.17e-11};

  bool ok = slope >= 3.5;
  for (int i = 0; i < 3; ++i) ok = ok && within(interp_err[i], frozen_interp[i], 0.20);
  ok = ok && inv_err[0] > inv_err[1] && inv_err[1] > inv_err[2];
  for (int i = 0; i < 3; ++i) ok = ok && within(inv_err[i], frozen_inv[i], 0.20);

  r.passed = ok;
  r.detail = "slope " + fmt(slope) + " (need 3.5), interp " + fmt(interp_err[0]) + "/" +
             fmt(interp_err[1]) + "/" + fmt(interp_err[2]) + ", inversion " +
             fmt(inv_err[0]) + "/" + fmt(inv_err[1]) + "/" + fmt(inv_err[2]);
  r.seconds = tm.seconds();
  return r;
}

// 6. The J_max = 3 frame on S2: partition of unity residual below 1e-14,
//    relative energy defect below 1e-9 for 50 random covered functions, and
//    atom spectra confined to their bands with exact zeros at the edges.
inline CriterionResult criterion_parseval_frame() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{6, "parseval frame energy and band supports"};

  const FrameSystem fs = build_frame(3);
  const double pou = fs.bank.partition_residual();

  Rng rng(606);
  double worst_defect = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const HarmonicCoefficients f =
        random_coefficients(Manifold::S2, fs.coverage, rng);
    const FrameCoefficients fc = frame_analyze(f, fs);
    worst_defect = std::max(
        worst_defect, std::fabs(fc.squared_sum() - f.squared_norm()) / f.squared_norm());
  }

  bool supports_ok = true;
  for (const FrameLevel& lv : fs.levels) {
    const HarmonicCoefficients atom = frame_atom(fs, lv.j, 0);
    bool any = false;
    for (const auto& [key, blk] : atom.blocks()) {
      if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
      any = true;
      const double lam = degree_lambda(key.first);
      if (lam < lv.band_lo || lam > lv.band_hi) supports_ok = false;
    }
    supports_ok = supports_ok && any;
    // the filters vanish identically at the band edges
    if (lv.j > 0) supports_ok = supports_ok && fs.bank.phi(lv.j, lv.band_lo) == 0.0;
    supports_ok = supports_ok && fs.bank.phi(lv.j, lv.band_hi) == 0.0;
  }
  supports_ok = supports_ok && fs.bank.phi(0, 0.0) == 1.0;

  r.passed = pou < 1e-14 && worst_defect < 1e-9 && supports_ok;
  r.detail = "pou residual " + fmt(pou) + ", energy defect " + fmt(worst_defect) +
             " (50 functions), band supports " + (supports_ok ? "exact" : "BROKEN") +
             ", " + std::to_string(fs.atom_count()) + " atoms";
  r.seconds = tm.seconds();
  return r;
}

// 7. Both reconstruction iterations contract geometrically: the Voronoi
//    iteration with a stable fitted ratio (spread <= 10% after step 3), the
//    relaxed frame iteration at or below its eta = (B-A)/(A+B) bound + 0.05.
inline CriterionResult criterion_iterations() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{7, "reconstruction iterations contract"};

  Rng rng(707);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, 30.0, rng);
  const Lattice L = generate_lattice(Manifold::S2, 0.5, false, 17);
  std::vector<double> samples(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) samples[i] = synthesize_at(f, L.pts[i]);
  const auto [rec, tr] = iterative_reconstruct(samples, L, 30.0, 1e-12, 60, &f);

  std::vector<double> ratios;
  const double floor = 1e-13 * (tr.errors.empty() ? 1.0 : tr.errors.front());
  for (std::size_t i = 3; i + 1 < tr.errors.size(); ++i) {
    if (tr.errors[i + 1] <= floor || tr.errors[i] <= floor) break;
    ratios.push_back(tr.errors[i + 1] / tr.errors[i]);
  }
  double spread = 1.0;
  if (ratios.size() >= 3) {
    double mean = 0.0;
    for (double q : ratios) mean += q;
    mean /= static_cast<double>(ratios.size());
    spread = 0.0;
    for (double q : ratios) spread = std::max(spread, std::fabs(q - mean) / mean);
  }

  const HarmonicCoefficients f2 = random_coefficients(Manifold::S2, 6.0, rng);
  const Lattice L2 = generate_lattice(Manifold::S2, 0.12, false, 19);
  std::vector<double> samples2(L2.size());
  for (std::size_t i = 0; i < L2.size(); ++i) samples2[i] = synthesize_at(f2, L2.pts[i]);
  const auto [rec2, tr2] =
      frame_algorithm(samples2, L2, 6.0, std::nullopt, 1e-12, 50, &f2);

  const bool voronoi_ok = tr.converged && ratios.size() >= 3 && spread <= 0.10;
  const bool frame_ok = tr2.converged && tr2.contraction <= tr2.bound + 0.05;
  r.passed = voronoi_ok && frame_ok;
  r.detail = "voronoi ratio spread " + fmt(spread) + " over " +
             std::to_string(ratios.size()) + " steps (contraction " +
             fmt(tr.contraction) + "), frame ratio " + fmt(tr2.contraction) +
             " vs bound " + fmt(tr2.bound);
  r.seconds = tm.seconds();
  return r;
}

// 8. Cubature weights are positive, sum to one, integrate the whole space
//    exactly, and mu_nu * omega stays inside the frozen empirical bracket
//    across omega in {6, 12, 20}.
inline CriterionResult criterion_cubature() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{8, "cubature positivity, moments, weight bracket"};

  // frozen bracket for mu_nu * omega^{n/2}, n = 2, recorded across the three runs
  const double bracket_lo = 0.010, bracket_hi = 0.065;
  const double omegas[3] = {6.0, 12.0, 20.0};
  const double rhos[3] = {0.37, 0.26, 0.20};

  bool ok = true;
  double worst_moment = 0.0, mass_defect = 0.0;
  double bmin = 1e300, bmax = 0.0;
  for (int idx = 0; idx < 3; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, 801 + idx);
    const Cubature C = compute_cubature(L, omegas[idx]);
    ok = ok && C.weights.minCoeff() > 0.0;
    mass_defect = std::max(mass_defect, std::fabs(C.weights.sum() - 1.0));

    // recompute the moments straight from the basis, independent of the
    // residual the solver reported
    const BasisSet bs = BasisSet::bandlimited(Manifold::S2, omegas[idx]);
    Eigen::VectorXd m = detail::moment_matrix(bs, L.pts) * C.weights;
    m[0] -= 1.0;
    worst_moment = std::max(worst_moment, m.cwiseAbs().maxCoeff());

    bmin = std::min(bmin, C.weights.minCoeff() * omegas[idx]);
    bmax = std::max(bmax, C.weights.maxCoeff() * omegas[idx]);
  }
  ok = ok && mass_defect <= 1e-12 && worst_moment <= 1e-10;
  ok = ok && bmin >= bracket_lo && bmax <= bracket_hi;

  r.passed = ok;
  r.detail = "moment defect " + fmt(worst_moment) + ", mass defect " + fmt(mass_defect) +
             ", weight bracket [" + fmt(bmin) + ", " + fmt(bmax) + "] in [" +
             fmt(bracket_lo) + ", " + fmt(bracket_hi) + "]";
  r.seconds = tm.seconds();
  return r;
}

// 9. Lattice cardinality scales like rho^{-2} with a frozen constant, and the
//    dimension formula for E_omega agrees with direct slot enumeration (and
//    with the closed forms on S2 and SO(3)).
inline CriterionResult criterion_counting() {
  using namespace selftest_detail;
  Timer tm;
  CriterionResult r{9, "lattice cardinality and dimension counts"};

  const double rhos[3] = {0.4, 0.3, 0.2};
  const std::uint64_t seeds[3] = {91, 92, 93};
  const double frozen_card[3] = {23.36, 22.41, 22.40};
  bool card_ok = true;
  std::string card_detail, frozen_detail;
  for (int idx = 0; idx < 3; ++idx) {
    const Lattice L = generate_lattice(Manifold::S2, rhos[idx], false, seeds[idx]);
    const double val = static_cast<double>(L.size()) * rhos[idx] * rhos[idx];
    card_ok = card_ok && within(val, frozen_card[idx], 0.10);
    card_detail += (idx ? "/" : "") + fmt(val);
    frozen_detail += (idx ? "/" : "") + fmt(frozen_card[idx]);
  }

  bool dim_ok = true;
  for (const double omega : {0.0, 2.0, 6.0, 12.0, 20.0, 30.0, 42.0, 56.0, 64.0}) {
    const std::uint64_t K = static_cast<std::uint64_t>(max_degree_for(omega));
    const std::uint64_t s2_closed = (K + 1) * (K + 1);
    const std::uint64_t so3_closed = (K + 1) * (2 * K + 1) * (2 * K + 3) / 3;
    dim_ok = dim_ok && weyl_dimension(Manifold::S2, omega) == s2_closed;
    dim_ok = dim_ok && weyl_dimension(Manifold::SO3, omega) == so3_closed;
    for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2})
      dim_ok = dim_ok &&
               weyl_dimension(m, omega) == BasisSet::bandlimited(m, omega).size();
  }

  r.passed = card_ok && dim_ok;
  r.detail = "N rho^2 = " + card_detail + " (frozen " + frozen_detail +
             " +-10%), dimension " +
             std::string(dim_ok ? "counts agree" : "counts DISAGREE");
  r.seconds = tm.seconds();
  return r;
}

inline std::vector<CriterionResult> run_selftest(std::ostream& out) {
  using Fn = CriterionResult (*)();
  const Fn criteria[] = {
      criterion_multipliers,     criterion_round_trips,
      criterion_discrete_inversion, criterion_spline_interpolation,
      criterion_spline_convergence, criterion_parseval_frame,
      criterion_iterations,      criterion_cubature,
      criterion_counting};

  std::vector<CriterionResult> results;
  double total = 0.0;
  int passed = 0;
  for (const Fn fn : criteria) {
    CriterionResult res = fn();
    total += res.seconds;
    passed += res.passed ? 1 : 0;
    char line[512];
    std::snprintf(line, sizeof line, "[%d] %-46s %s  %6.1fs  %s\n", res.number,
                  res.name.c_str(), res.passed ? "pass" : "FAIL", res.seconds,
                  res.detail.c_str());
    out << line;
    out.flush();
    results.push_back(std::move(res));
  }
  char tail[128];
  std::snprintf(tail, sizeof tail, "selftest: %d/%zu criteria passed, %.1fs total\n",
                passed, std::size(results), total);
  out << tail;
  out.flush();
  return results;
}

inline bool selftest_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.passed; });
}

}  // namespace manirad
