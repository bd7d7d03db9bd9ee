#pragma once

// Positive-weight cubature on metric lattices and the discrete (exact)
// inversion formulas built on it. A cubature is exact to omega when every
// basis slot with lambda <= omega has vanishing weighted sum (and the
// constant slot integrates to 1, the total mass of the normalized measure).
//
// Weight solve: Voronoi cell masses give a positive, mass-one starting
// family; the moment defect is then removed by a minimum-norm correction,
// clamping at zero along the way (active set). Positivity and the moment
// residuals are verified at the end, never assumed: an infeasible lattice
// (too sparse for the requested exactness) is reported with its residual and
// the worst moment, and the caller densifies.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manirad/geometry.hpp"
#include "manirad/quadrature.hpp"
#include "manirad/spaces.hpp"
#include "manirad/transforms.hpp"

namespace manirad {

struct Cubature {
  Lattice lattice;
  Eigen::VectorXd weights;
  double omega_exact = 0.0;
  double residual = 0.0;  // max moment defect actually achieved

  std::size_t size() const { return lattice.pts.size(); }
};

namespace detail {

// slots x points matrix of basis values; rows follow bs.slots() order.
inline Eigen::MatrixXd moment_matrix(const BasisSet& bs, const std::vector<Point>& pts) {
  Eigen::MatrixXd M(bs.size(), pts.size());
  parallel_for(pts.size(), [&](std::size_t nu) { M.col(nu) = bs.evaluate_all(pts[nu]); });
  return M;
}

inline std::string slot_name(const BasisSlot& s, Manifold m) {
  std::string out = "(" + std::to_string(s.k1) + "," + std::to_string(s.i);
  if (m == Manifold::SO3) out += "," + std::to_string(s.j);
  if (m == Manifold::S2xS2)
    out += "," + std::to_string(s.k2) + "," + std::to_string(s.j);
  return out + ")";
}

// Voronoi cell masses against a quadrature grid fine enough to resolve the
// cells (targets several grid nodes per lattice point).
inline Eigen::VectorXd voronoi_masses(const Lattice& L) {
  const std::size_t want = 8 * L.pts.size() + 64;
  const int cap = L.manifold == Manifold::S2 ? 720 : 160;
  int deg = 4;
  QuadratureGrid grid = make_quadrature(L.manifold, deg);
  while (grid.pts.size() < want && deg < cap) {
    deg += std::max(2, deg / 4);
    grid = make_quadrature(L.manifold, deg);
  }
  const VoronoiPartition part = voronoi_partition(L, grid);
  Eigen::VectorXd mu =
      Eigen::Map<const Eigen::VectorXd>(part.mass.data(), part.mass.size());
  // A cell the grid missed would pin its weight at zero for good; give it a
  // token mass and let the moment correction sort it out.
  const double floor = 1e-3 / static_cast<double>(L.pts.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu[i] = std::max(mu[i], floor);
  return mu;
}

}  // namespace detail

// Max moment defect of the weighted family over all slots with
// lambda <= omega; worst_slot receives the argmax when given.
inline double cubature_moment_residual(const Lattice& L, const Eigen::VectorXd& mu,
                                       double omega, BasisSlot* worst_slot = nullptr) {
  const BasisSet bs = BasisSet::bandlimited(L.manifold, omega);
  const Eigen::MatrixXd M = detail::moment_matrix(bs, L.pts);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(bs.size());
  b[0] = 1.0;
  const Eigen::VectorXd r = (M * mu - b).cwiseAbs();
  Eigen::Index iw = 0;
  const double rmax = r.maxCoeff(&iw);
  if (worst_slot) *worst_slot = bs.slots()[static_cast<std::size_t>(iw)];
  return rmax;
}

inline Cubature compute_cubature(const Lattice& L, double omega_exact) {
  if (omega_exact < 0.0) throw precondition_error("compute_cubature: negative omega");
  Cubature C;
  C.lattice = L;
  C.omega_exact = omega_exact;
  const std::size_t N = L.pts.size();

  Eigen::VectorXd mu = detail::voronoi_masses(L);
  const BasisSet bs = BasisSet::bandlimited(L.manifold, omega_exact);
  if (bs.size() > N)
    throw certification_error("compute_cubature: " + std::to_string(bs.size()) +
                              " moments but only " + std::to_string(N) +
                              " points; densify the lattice");
  const Eigen::MatrixXd M = detail::moment_matrix(bs, L.pts);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(bs.size());
  b[0] = 1.0;

  std::vector<std::size_t> free(N);
  for (std::size_t i = 0; i < N; ++i) free[i] = i;
  for (int pass = 0; pass < 40; ++pass) {
    const Eigen::VectorXd r = b - M * mu;
    if (r.cwiseAbs().maxCoeff() <= 1e-13) break;
    // Correction minimizing sum(step^2 / mu): relative changes stay even
    // across nodes, so small weights are not driven through zero by the
    // large high-degree moment defects of the Voronoi initializer.
    Eigen::MatrixXd Mf(bs.size(), free.size());
    Eigen::VectorXd scale(free.size());
    for (std::size_t c = 0; c < free.size(); ++c) {
      scale[c] = std::sqrt(mu[free[c]]);
      Mf.col(c) = M.col(free[c]) * scale[c];
    }
    Eigen::VectorXd step =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(Mf).solve(r);
    step.array() *= scale.array();
    double alpha = 1.0;
    for (std::size_t c = 0; c < free.size(); ++c)
      if (step[c] < 0.0) alpha = std::min(alpha, -mu[free[c]] / step[c]);
    for (std::size_t c = 0; c < free.size(); ++c) mu[free[c]] += alpha * step[c];
    if (alpha < 1.0) {
      // clamp exhausted weights and retry on the rest
      std::vector<std::size_t> still;
      for (std::size_t idx : free) {
        if (mu[idx] <= 1e-15)
          mu[idx] = 0.0;
        else
          still.push_back(idx);
      }
      if (still.size() == free.size())
        throw certification_error("compute_cubature: stalled active-set step");
      free.swap(still);
      if (free.empty()) break;
    }
  }

  BasisSlot worst;
  C.residual = cubature_moment_residual(L, mu, omega_exact, &worst);
  if (C.residual > 1e-10)
    throw certification_error(
        "compute_cubature: infeasible at omega " + std::to_string(omega_exact) +
        ", moment residual " + std::to_string(C.residual) + " at slot " +
        detail::slot_name(worst, L.manifold) + "; densify the lattice");
  const double mmin = mu.minCoeff();
  if (!(mmin > 0.0))
    throw certification_error(
        "compute_cubature: weight " + std::to_string(mmin) +
        " is not strictly positive; densify the lattice");
  C.weights = mu;
  return C;
}

// Product of two sphere cubatures. Weights multiply, so positivity and unit
// mass are inherited; exactness on the product certificate
// min(omega_a, omega_b) holds because factor degrees integrate separately,
// and is re-verified by the caller's tests rather than assumed silently.
inline Cubature product_cubature(const Cubature& A, const Cubature& B) {
  if (A.lattice.manifold != Manifold::S2 || B.lattice.manifold != Manifold::S2)
    throw precondition_error("product_cubature: needs two S2 cubatures");
  Cubature C;
  C.lattice.manifold = Manifold::S2xS2;
  C.lattice.rho = std::hypot(A.lattice.rho, B.lattice.rho);
  C.lattice.symmetric = false;
  const std::size_t na = A.size(), nb = B.size();
  C.lattice.pts.reserve(na * nb);
  C.weights.resize(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    const Vec3 a = std::get<Vec3>(A.lattice.pts[i]);
    for (std::size_t j = 0; j < nb; ++j) {
      C.lattice.pts.push_back(
          Point(ProductPoint{a, std::get<Vec3>(B.lattice.pts[j])}));
      C.weights[i * nb + j] = A.weights[i] * B.weights[j];
    }
  }
  // separation: points differing in one factor keep that factor's spacing;
  // covering: worst case is the hypotenuse of the factor coverings
  C.lattice.cert.separation =
      std::min(A.lattice.cert.separation, B.lattice.cert.separation);
  C.lattice.cert.covering =
      std::hypot(A.lattice.cert.covering, B.lattice.cert.covering);
  C.omega_exact = std::min(A.omega_exact, B.omega_exact);
  C.residual = std::max(A.residual, B.residual);
  return C;
}

// Fourier coefficients of a function in E_omega from its samples on the
// cubature nodes. Exact when the certificate covers products of two
// bandlimited factors; analyze enforces that.
inline HarmonicCoefficients discrete_fourier(const std::vector<double>& samples,
                                             const Cubature& C, double omega) {
  if (samples.size() != C.size())
    throw precondition_error("discrete_fourier: sample count != node count");
  std::vector<double> w(C.weights.data(), C.weights.data() + C.weights.size());
  return analyze(C.lattice.manifold, C.lattice.pts, samples, w, omega, C.omega_exact);
}

// Recovers an even f in E_omega on S2 from samples of its great-circle mean
// transform on the cubature nodes.
inline HarmonicCoefficients discrete_invert_funk_radon(const std::vector<double>& samples,
                                                       const Cubature& C, double omega) {
  if (C.lattice.manifold != Manifold::S2)
    throw precondition_error("discrete_invert_funk_radon: cubature must live on S2");
  HarmonicCoefficients g = discrete_fourier(samples, C, omega);
  g.prune(1e-12);
  return funk_radon_inverse(g);
}

// Recovers f in E_omega on SO(3) from samples of its circle-mean transform on
// product cubature nodes. Only the diagonal degree pairs carry image content,
// so the coefficients are formed directly against Y_k^i(a) Y_k^j(b); that
// needs the cubature to integrate factor degrees up to twice the image
// degree, i.e. certificate >= 2 lambda(2K).
inline HarmonicCoefficients discrete_invert_so3(const std::vector<double>& samples,
                                                const Cubature& C, double omega) {
  if (C.lattice.manifold != Manifold::S2xS2)
    throw precondition_error("discrete_invert_so3: cubature must live on S2xS2");
  if (samples.size() != C.size())
    throw precondition_error("discrete_invert_so3: sample count != node count");
  const int K = max_degree_for(omega);
  const double required = 2.0 * degree_lambda(2 * K);
  if (C.omega_exact + bandwidth_slack < required)
    throw precondition_error("discrete_invert_so3: exactness certificate " +
                             std::to_string(C.omega_exact) + " below the required " +
                             std::to_string(required));

  std::vector<std::size_t> offset(K + 2, 0);
  for (int k = 0; k <= K; ++k)
    offset[k + 1] = offset[k] + std::size_t(2 * k + 1) * (2 * k + 1);
  const std::size_t Sd = offset[K + 1];

  // per-point contributions in chunks; columns summed in index order so the
  // result does not depend on the thread count
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(Sd);
  const std::size_t chunk = 4096;
  Eigen::MatrixXd buf(Sd, std::min(chunk, C.size()));
  for (std::size_t start = 0; start < C.size(); start += chunk) {
    const std::size_t n = std::min(chunk, C.size() - start);
    parallel_for(n, [&](std::size_t c) {
      const std::size_t nu = start + c;
      const auto& pp = std::get<ProductPoint>(C.lattice.pts[nu]);
      const SphBlock ba = sph_block(K, pp.a), bb = sph_block(K, pp.b);
      const double wv = C.weights[nu] * samples[nu];
      for (int k = 0; k <= K; ++k) {
        Eigen::Map<Eigen::MatrixXd> blk(buf.col(c).data() + offset[k], 2 * k + 1,
                                        2 * k + 1);
        for (int j = 1; j <= 2 * k + 1; ++j)
          for (int i = 1; i <= 2 * k + 1; ++i)
            blk(i - 1, j - 1) = wv * ba.at(k, i) * bb.at(k, j);
      }
    });
    for (std::size_t c = 0; c < n; ++c) acc += buf.col(c);
  }

  HarmonicCoefficients img(Manifold::S2xS2, 2.0 * omega);
  for (int k = 0; k <= K; ++k) {
    const auto blk =
        Eigen::Map<const Eigen::MatrixXd>(acc.data() + offset[k], 2 * k + 1, 2 * k + 1);
    if (blk.cwiseAbs().maxCoeff() > 1e-13) img.block(k, k) = blk;
  }
  return so3_radon_inverse(img);
}

}  // namespace manirad
