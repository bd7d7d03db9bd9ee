#pragma once

// Bandlimited Parseval frames on the sphere from a dyadic Littlewood-Paley
// filter bank and per-level positive cubature.
//
// The squared filters tile the spectrum: level 0 carries g(s), level j >= 1
// carries G(4^{-j} s) with G(s) = g(s) - g(4s), so partial sums telescope to
// g(4^{-J} s) and the partition of unity is exact (not merely approximate)
// for s <= 4^J. Atoms are filtered zonal kernels centered at lattice points,
//
//   psi_{j,k}(y) = sum_deg phi_j(lambda_deg) (2 deg + 1) P_deg(x_{j,k} . y),
//
// stored spectrally; Psi_{j,k} = sqrt(b_{j,k}) psi_{j,k} with b the level-j
// cubature weights. Exact cubature on products of band-limited factors turns
// the frame operator into sum_j Phi_j(L)^2 = identity on the covered band,
// which is what the analysis/synthesis round trip tests certify.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manirad/discretize.hpp"
#include "manirad/geometry.hpp"
#include "manirad/spaces.hpp"

namespace manirad {

// Smooth cutoff: 1 on [0,1], 0 on [4,inf), C-infinity monotone in between.
inline double frame_cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 4.0) return 0.0;
  const auto h = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double ha = h((4.0 - s) / 3.0), hb = h((s - 1.0) / 3.0);
  return ha / (ha + hb);
}

struct FilterBank {
  int jmax = 0;

  static double g(double s) { return frame_cutoff(s); }
  static double G(double s) { return frame_cutoff(s) - frame_cutoff(4.0 * s); }

  // squared level filter at eigenvalue s
  double phi_sq(int j, double s) const {
    if (j == 0) return g(s);
    return G(s * std::pow(0.25, j));
  }
  double phi(int j, double s) const { return std::sqrt(std::max(0.0, phi_sq(j, s))); }

  // [band_lo, band_hi] support of level j in lambda
  double band_lo(int j) const { return j == 0 ? 0.0 : std::pow(4.0, j - 1); }
  double band_hi(int j) const { return std::pow(4.0, j + 1); }
  double coverage() const { return std::pow(4.0, jmax); }

  double partition_residual(int samples = 4096) const {
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double s = coverage() * i / samples;
      double acc = 0.0;
      for (int j = 0; j <= jmax; ++j) acc += phi_sq(j, s);
      worst = std::max(worst, std::fabs(1.0 - acc));
    }
    return worst;
  }
};

inline FilterBank build_filter_bank(int jmax) {
  if (jmax < 1) throw precondition_error("build_filter_bank: need jmax >= 1");
  FilterBank fb;
  fb.jmax = jmax;
  const double r = fb.partition_residual();
  if (r >= 1e-14)
    throw certification_error("filter bank partition of unity residual " +
                              std::to_string(r));
  return fb;
}

struct FrameLevel {
  int j = 0;
  double band_lo = 0.0, band_hi = 0.0;
  int kmax = 0;                // largest degree inside the band
  std::vector<double> phi;     // phi_j(lambda_k), k = 0..kmax; zero off band
  Lattice lattice;
  Eigen::VectorXd b;           // positive cubature weights
  double cubature_residual = 0.0;

  std::size_t atoms() const { return lattice.pts.size(); }
};

struct FrameSystem {
  FilterBank bank;
  std::vector<FrameLevel> levels;
  double coverage = 0.0;

  std::size_t atom_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.atoms();
    return n;
  }
};

// Spectral coefficients of one atom (unweighted psi).
inline HarmonicCoefficients frame_atom(const FrameSystem& fs, int j, std::size_t k) {
  const FrameLevel& lv = fs.levels.at(j);
  const Vec3 x = std::get<Vec3>(lv.lattice.pts.at(k));
  const SphBlock sb = sph_block(lv.kmax, x);
  HarmonicCoefficients c(Manifold::S2, lv.band_hi);
  for (int deg = 0; deg <= lv.kmax; ++deg) {
    if (lv.phi[deg] == 0.0) continue;
    Eigen::MatrixXd& blk = c.block(deg);
    for (int i = 1; i <= 2 * deg + 1; ++i) blk(i - 1, 0) = lv.phi[deg] * sb.at(deg, i);
  }
  return c;
}

// Closed-form atom value: filtered zonal kernel in the geodesic cosine.
inline double frame_atom_value(const FrameLevel& lv, const Vec3& center, const Vec3& y) {
  const std::vector<double> P = legendre_all(lv.kmax, center.dot(y));
  double s = 0.0;
  for (int deg = lv.kmax; deg >= 0; --deg)
    s += lv.phi[deg] * (2.0 * deg + 1.0) * P[deg];
  return s;
}

inline FrameSystem build_frame(int jmax, double lattice_constant = 0.45,
                               std::uint64_t seed = 1) {
  FrameSystem fs;
  fs.bank = build_filter_bank(jmax);
  fs.coverage = fs.bank.coverage();
  for (int j = 0; j <= jmax; ++j) {
    FrameLevel lv;
    lv.j = j;
    lv.band_lo = fs.bank.band_lo(j);
    lv.band_hi = fs.bank.band_hi(j);
    lv.kmax = max_degree_for(lv.band_hi);
    lv.phi.resize(lv.kmax + 1);
    for (int k = 0; k <= lv.kmax; ++k) lv.phi[k] = fs.bank.phi(j, degree_lambda(k));
    const double need = product_bandwidth(Manifold::S2, lv.band_hi, lv.band_hi);
    // The positivity certificate can fail on an unlucky lattice; densify and
    // retry before giving up.
    double rho = lattice_constant * std::pow(0.5, j);
    std::string last;
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt, rho *= 0.85) {
      lv.lattice = generate_lattice(Manifold::S2, rho, false, seed + 31 * j + attempt);
      try {
        const Cubature c = compute_cubature(lv.lattice, need);
        lv.b = c.weights;
        lv.cubature_residual = c.residual;
        ok = true;
      } catch (const certification_error& e) {
        last = e.what();
      }
    }
    if (!ok)
      throw certification_error("build_frame: level " + std::to_string(j) +
                                " cubature failed: " + last);
    fs.levels.push_back(std::move(lv));
  }
  return fs;
}

struct FrameCoefficients {
  std::vector<Eigen::VectorXd> level;

  double squared_sum() const {
    double s = 0.0;
    for (const auto& v : level) s += v.squaredNorm();
    return s;
  }
};

// <f, Psi_{j,k}> = sqrt(b_{j,k}) (Phi_j(L) f)(x_{j,k}), computed by filtering
// the coefficients and synthesizing on the level lattice.
inline FrameCoefficients frame_analyze(const HarmonicCoefficients& f,
                                       const FrameSystem& fs) {
  if (f.manifold() != Manifold::S2)
    throw precondition_error("frame_analyze: frame lives on S2");
  if (f.omega() > fs.coverage + bandwidth_slack)
    throw precondition_error("frame_analyze: bandwidth " + std::to_string(f.omega()) +
                             " exceeds frame coverage " + std::to_string(fs.coverage));
  FrameCoefficients out;
  out.level.reserve(fs.levels.size());
  for (const FrameLevel& lv : fs.levels) {
    HarmonicCoefficients filt(Manifold::S2, std::min(f.omega(), lv.band_hi));
    for (const auto& [key, blk] : f.blocks()) {
      if (key.first > lv.kmax || lv.phi[key.first] == 0.0) continue;
      filt.block(key.first) = lv.phi[key.first] * blk;
    }
    const std::vector<double> vals = synthesize(filt, lv.lattice.pts);
    Eigen::VectorXd c(lv.atoms());
    for (std::size_t k = 0; k < lv.atoms(); ++k)
      c[k] = std::sqrt(lv.b[k]) * vals[k];
    out.level.push_back(std::move(c));
  }
  return out;
}

// f = sum_{j,k} c_{j,k} Psi_{j,k}; per level this is a filtered, weighted
// adjoint sum over the lattice. Per-atom contributions are accumulated in
// index order (chunked) so results do not depend on the thread count.
inline HarmonicCoefficients frame_synthesize(const FrameCoefficients& coeffs,
                                             const FrameSystem& fs) {
  if (coeffs.level.size() != fs.levels.size())
    throw precondition_error("frame_synthesize: level count mismatch");
  const double out_omega = fs.levels.empty() ? 0.0 : fs.levels.back().band_hi;
  HarmonicCoefficients out(Manifold::S2, out_omega);
  for (std::size_t li = 0; li < fs.levels.size(); ++li) {
    const FrameLevel& lv = fs.levels[li];
    const Eigen::VectorXd& c = coeffs.level[li];
    if (static_cast<std::size_t>(c.size()) != lv.atoms())
      throw precondition_error("frame_synthesize: atom count mismatch at level " +
                               std::to_string(lv.j));
    const std::size_t S = std::size_t(lv.kmax + 1) * (lv.kmax + 1);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(S);
    const std::size_t chunk = 2048;
    Eigen::MatrixXd buf(S, std::min(chunk, lv.atoms()));
    for (std::size_t start = 0; start < lv.atoms(); start += chunk) {
      const std::size_t n = std::min(chunk, lv.atoms() - start);
      parallel_for(n, [&](std::size_t ci) {
        const std::size_t k = start + ci;
        const SphBlock sb = sph_block(lv.kmax, std::get<Vec3>(lv.lattice.pts[k]));
        const double w = std::sqrt(lv.b[k]) * c[k];
        double* col = buf.col(ci).data();
        for (int deg = 0; deg <= lv.kmax; ++deg)
          for (int i = 1; i <= 2 * deg + 1; ++i)
            col[deg * deg + i - 1] = w * lv.phi[deg] * sb.at(deg, i);
      });
      for (std::size_t ci = 0; ci < n; ++ci) acc += buf.col(ci);
    }
    for (int deg = 0; deg <= lv.kmax; ++deg) {
      bool any = false;
      for (int i = 1; i <= 2 * deg + 1 && !any; ++i)
        any = acc[deg * deg + i - 1] != 0.0;
      if (!any) continue;
      Eigen::MatrixXd& blk = out.block(deg);
      for (int i = 1; i <= 2 * deg + 1; ++i) blk(i - 1, 0) += acc[deg * deg + i - 1];
    }
  }
  out.prune(0.0);
  return out;
}

// Decay of one atom along geodesic rays from its center: reports
// sup |psi| (1 + 2^j d)^N 4^{-j} for N in {2,4,6} (the 4^{-j} = 2^{-nj}
// normalization, n = 2) plus the center and sup values.
struct LocalizationReport {
  double center_value = 0.0;
  double sup_abs = 0.0;
  double c2 = 0.0, c4 = 0.0, c6 = 0.0;
};

inline LocalizationReport localization_profile(const FrameSystem& fs, int j,
                                               std::size_t k, int rays = 8,
                                               int steps = 160) {
  const FrameLevel& lv = fs.levels.at(j);
  const Vec3 x0 = std::get<Vec3>(lv.lattice.pts.at(k));
  // tangent basis at x0
  Vec3 e = std::fabs(x0.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = x0.cross(e).normalized();
  const Vec3 e2 = x0.cross(e1).normalized();

  LocalizationReport rep;
  rep.center_value = frame_atom_value(lv, x0, x0);
  rep.sup_abs = std::fabs(rep.center_value);
  const double scale = std::pow(0.25, j);
  rep.c2 = rep.c4 = rep.c6 = std::fabs(rep.center_value) * scale;
  for (int r = 0; r < rays; ++r) {
    const double ph = 2.0 * pi * r / rays;
    const Vec3 dir = std::cos(ph) * e1 + std::sin(ph) * e2;
    for (int sidx = 1; sidx <= steps; ++sidx) {
      const double th = pi * sidx / steps;
      const Vec3 y = std::cos(th) * x0 + std::sin(th) * dir;
      const double v = std::fabs(frame_atom_value(lv, x0, y));
      rep.sup_abs = std::max(rep.sup_abs, v);
      const double base = 1.0 + std::pow(2.0, j) * th;
      rep.c2 = std::max(rep.c2, v * std::pow(base, 2) * scale);
      rep.c4 = std::max(rep.c4, v * std::pow(base, 4) * scale);
      rep.c6 = std::max(rep.c6, v * std::pow(base, 6) * scale);
    }
  }
  return rep;
}

// Fully discrete reconstruction: frame coefficients are formed from point
// samples of f on a master cubature (d_{j,k} = sum_nu mu_nu f_nu
// psi_{j,k}(x_nu)), then synthesized with the cubature weights b_{j,k}
// folded in. Exact for f in E_{4^J - 1} when the master rule integrates
// products of f with every used atom band.
inline HarmonicCoefficients discrete_frame_representation(
    const std::vector<double>& samples, const Cubature& master, const FrameSystem& fs,
    int J) {
  if (master.lattice.manifold != Manifold::S2)
    throw precondition_error("discrete_frame_representation: master rule must be on S2");
  if (samples.size() != master.size())
    throw precondition_error("discrete_frame_representation: sample/node mismatch");
  const double omega = std::pow(4.0, J) - 1.0;
  if (omega > fs.coverage + bandwidth_slack)
    throw precondition_error("discrete_frame_representation: J exceeds frame coverage");

  FrameCoefficients coeffs;
  coeffs.level.resize(fs.levels.size());
  for (std::size_t li = 0; li < fs.levels.size(); ++li) {
    const FrameLevel& lv = fs.levels[li];
    coeffs.level[li] = Eigen::VectorXd::Zero(lv.atoms());
    if (lv.band_lo > omega + bandwidth_slack) continue;  // no spectral overlap
    const double need = product_bandwidth(Manifold::S2, omega, lv.band_hi);
    if (master.omega_exact + bandwidth_slack < need)
      throw precondition_error(
          "discrete_frame_representation: master exactness " +
          std::to_string(master.omega_exact) + " below the required " +
          std::to_string(need) + " for level " + std::to_string(lv.j));
    Eigen::VectorXd& c = coeffs.level[li];
    parallel_for(lv.atoms(), [&](std::size_t k) {
      const Vec3 center = std::get<Vec3>(lv.lattice.pts[k]);
      double acc = 0.0;
      for (std::size_t nu = 0; nu < master.size(); ++nu)
        acc += master.weights[nu] * samples[nu] *
               frame_atom_value(lv, center, std::get<Vec3>(master.lattice.pts[nu]));
      c[k] = std::sqrt(lv.b[k]) * acc;
    });
  }
  return frame_synthesize(coeffs, fs);
}

}  // namespace manirad
