#pragma once

// Recovery of bandlimited functions from lattice samples without solving a
// linear system: a contractive Voronoi-average approximation operator drives
// a damped fixed-point iteration, and a relaxed frame iteration handles the
// same problem given pointwise projections plus Plancherel-Polya bounds.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "manirad/discretize.hpp"
#include "manirad/geometry.hpp"
#include "manirad/quadrature.hpp"
#include "manirad/spaces.hpp"

namespace manirad {

struct IterationTrace {
  // ||f - f_m|| against the reference when one is supplied, update norms
  // ||f_{m+1} - f_m|| otherwise
  std::vector<double> errors;
  double contraction = 0.0;  // measured geometric ratio after burn-in
  double bound = 0.0;        // theoretical ratio when known (eta), else 0
  int steps = 0;
  bool converged = false;
};

namespace detail {

// Geometric mean of successive error ratios, skipping the first `burn`
// steps and anything already at the rounding floor.
inline double fitted_ratio(const std::vector<double>& e, int burn = 3) {
  const double floor = (e.empty() ? 0.0 : e.front()) * 1e-14;
  double logsum = 0.0;
  int n = 0;
  for (std::size_t i = burn + 1; i < e.size(); ++i) {
    if (e[i] <= floor || e[i - 1] <= floor) break;
    logsum += std::log(e[i] / e[i - 1]);
    ++n;
  }
  return n ? std::exp(logsum / n) : 0.0;
}

inline HarmonicCoefficients slots_to_harmonics(const BasisSet& bs,
                                               const Eigen::VectorXd& v,
                                               Manifold m, double omega) {
  HarmonicCoefficients c(m, omega);
  const auto& slots = bs.slots();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (v[s] == 0.0) continue;
    const BasisSlot& sl = slots[s];
    if (m == Manifold::S2)
      c.set(sl.k1, sl.i, v[s]);
    else if (m == Manifold::SO3)
      c.set(sl.k1, sl.i, sl.j, v[s]);
    else
      c.set(sl.k1, sl.i, sl.k2, sl.j, v[s]);
  }
  return c;
}

}  // namespace detail

// P_omega applied to the nearest-neighbor step interpolant. The projection
// matrix integrates every basis function over every Voronoi cell against a
// grid fine enough to resolve the cells, so building it dominates the cost
// and the per-application work is one slots-by-N product.
struct ApproximationOperator {
  Lattice lattice;
  double omega = 0.0;
  BasisSet basis;
  Eigen::MatrixXd theta;  // slots x N, column nu integrates the cell of nu

  HarmonicCoefficients apply(const std::vector<double>& samples) const {
    if (samples.size() != lattice.size())
      throw precondition_error("voronoi approximation: sample count mismatch");
    const Eigen::VectorXd c =
        theta * Eigen::Map<const Eigen::VectorXd>(samples.data(), samples.size());
    return detail::slots_to_harmonics(basis, c, lattice.manifold, omega);
  }
};

inline ApproximationOperator make_approximation_operator(const Lattice& L,
                                                         double omega) {
  ApproximationOperator op;
  op.lattice = L;
  op.omega = omega;
  op.basis = BasisSet::bandlimited(L.manifold, omega);

  const std::size_t want = 8 * L.size() + 64;
  const int cap = L.manifold == Manifold::S2 ? 720 : 160;
  int deg = std::max(4, op.basis.max_degree() + 1);
  QuadratureGrid grid = make_quadrature(L.manifold, deg);
  while (grid.pts.size() < want && deg < cap) {
    deg += std::max(2, deg / 4);
    grid = make_quadrature(L.manifold, deg);
  }
  const VoronoiPartition part = voronoi_partition(L, grid);

  op.theta = Eigen::MatrixXd::Zero(op.basis.size(), L.size());
  Eigen::MatrixXd vals(op.basis.size(), grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    vals.col(g) = op.basis.evaluate_all(grid.pts[g]);
  });
  for (std::size_t g = 0; g < grid.size(); ++g)
    op.theta.col(part.owner[g]) += grid.w[g] * vals.col(g);
  return op;
}

inline HarmonicCoefficients voronoi_approximation(const std::vector<double>& samples,
                                                  const Lattice& L, double omega) {
  return make_approximation_operator(L, omega).apply(samples);
}

// Fixed point iteration f_{m+1} = f_m + A(f - f_m). Samples of f - f_m come
// from synthesizing the running iterate on the lattice. Convergence is
// declared from the update norms and the measured contraction; a reference
// solution (tests only) switches the trace to true errors.
inline std::pair<HarmonicCoefficients, IterationTrace> iterative_reconstruct(
    const std::vector<double>& samples, const Lattice& L, double omega, double tol,
    int max_steps, const HarmonicCoefficients* reference = nullptr) {
  const ApproximationOperator op = make_approximation_operator(L, omega);
  // Below the space dimension the samples cannot determine f; the update
  // norms would still contract (toward a wrong sample-consistent function),
  // so this cannot be left to the ratio detector.
  if (op.basis.size() > L.size())
    throw certification_error(
        "iterative_reconstruct: " + std::to_string(L.size()) +
        " samples cannot determine a space of dimension " +
        std::to_string(op.basis.size()) + "; densify the lattice");
  HarmonicCoefficients f = op.apply(samples);
  IterationTrace tr;
  tr.bound = 0.0;

  const auto record = [&](const HarmonicCoefficients& cur, double update) {
    if (reference)
      tr.errors.push_back(linear_combination(1.0, cur, -1.0, *reference).norm());
    else
      tr.errors.push_back(update);
  };

  double prev_update = 0.0, sample_scale = 1e-300, last_diff = 0.0;
  for (const double s : samples) sample_scale = std::max(sample_scale, std::fabs(s));
  int bad = 0;
  record(f, f.norm());
  for (int m = 0; m < max_steps; ++m) {
    const std::vector<double> fm = synthesize(f, L.pts);
    std::vector<double> diff(fm.size());
    last_diff = 0.0;
    for (std::size_t i = 0; i < fm.size(); ++i) {
      diff[i] = samples[i] - fm[i];
      last_diff = std::max(last_diff, std::fabs(diff[i]));
    }
    const HarmonicCoefficients upd = op.apply(diff);
    const double un = upd.norm();
    f = linear_combination(1.0, f, 1.0, upd);
    tr.steps = m + 1;
    record(f, un);

    const double ratio = prev_update > 0.0 ? un / prev_update : 0.0;
    prev_update = un;
    const double est = un / (1.0 - std::min(0.999, std::max(ratio, 0.0)));
    if (est <= tol) {
      tr.converged = true;
      break;
    }
    // A ratio pinned near 1 means the operator is not contracting; waiting
    // for the step budget would only return garbage later.
    if (m > 0) {
      bad = ratio >= 0.999 ? bad + 1 : 0;
      if (bad >= 3) {
        tr.contraction = detail::fitted_ratio(tr.errors);
        throw certification_error(
            "iterative_reconstruct: not contracting after " +
            std::to_string(tr.steps) + " steps (last ratio " + std::to_string(ratio) +
            "); the lattice is too sparse for this bandwidth");
      }
    }
  }
  // Guards the corner where updates vanish along a direction the Voronoi
  // averages cannot see: the returned f must actually match the samples.
  // sup |g| <= sqrt(dim) ||g|| on E_omega bounds the legitimate residual.
  const double diff_limit =
      10.0 * tol * std::sqrt(static_cast<double>(op.basis.size())) +
      1e-12 * sample_scale;
  if (tr.converged && last_diff > diff_limit)
    throw certification_error(
        "iterative_reconstruct: iteration settled on a function whose samples "
        "differ from the input by " +
        std::to_string(last_diff) + "; sampling does not determine the space");
  tr.contraction = detail::fitted_ratio(tr.errors);
  return {std::move(f), std::move(tr)};
}

// Extreme eigenvalues of G = rho^n sum_nu u(x_nu) u(x_nu)^T on E_omega.
// These are the sharp constants in A ||f|| <= rho^{n/2} (sum |f(x_nu)|^2)^{1/2}
// <= B ||f|| over the bandlimited space.
inline std::pair<double, double> pp_frame_bounds(const Lattice& L, double omega) {
  const BasisSet bs = BasisSet::bandlimited(L.manifold, omega);
  const Eigen::MatrixXd M = detail::moment_matrix(bs, L.pts);
  const double rn = std::pow(L.rho, manifold_dim(L.manifold));
  Eigen::MatrixXd G = rn * (M * M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double A = es.eigenvalues().minCoeff();
  const double B = es.eigenvalues().maxCoeff();
  if (A <= 1e-12)
    throw certification_error(
        "pp_frame_bounds: sampling is rank deficient (lower bound " +
        std::to_string(A) + " with " + std::to_string(L.size()) + " points against " +
        std::to_string(bs.size()) + " dimensions)");
  return {A, B};
}

// Relaxed frame iteration f_m = f_{m-1} + gamma S(f - f_{m-1}) where
// S g = rho^n sum_nu g(x_nu) P_omega delta_{x_nu} and the projections are the
// point values <f, P_omega delta_{x_nu}> = f(x_nu). With gamma = 2/(A+B) the
// contraction ratio is eta = (B-A)/(A+B).
inline std::pair<HarmonicCoefficients, IterationTrace> frame_algorithm(
    const std::vector<double>& projections, const Lattice& L, double omega,
    std::optional<double> gamma, double tol, int max_steps,
    const HarmonicCoefficients* reference = nullptr) {
  if (projections.size() != L.size())
    throw precondition_error("frame_algorithm: projection count mismatch");
  const auto [A, B] = pp_frame_bounds(L, omega);
  const double g = gamma.value_or(2.0 / (A + B));
  if (!(g > 0.0) || g >= 2.0 / B)
    throw precondition_error("frame_algorithm: gamma " + std::to_string(g) +
                             " outside (0, 2/B) with B = " + std::to_string(B));

  const BasisSet bs = BasisSet::bandlimited(L.manifold, omega);
  const Eigen::MatrixXd M = detail::moment_matrix(bs, L.pts);
  const double rn = std::pow(L.rho, manifold_dim(L.manifold));
  const Eigen::VectorXd sf =
      rn * (M * Eigen::Map<const Eigen::VectorXd>(projections.data(),
                                                  projections.size()));

  IterationTrace tr;
  tr.bound = (B - A) / (A + B);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(bs.size());
  Eigen::VectorXd ref;
  if (reference) {
    ref.resize(bs.size());
    const HarmonicCoefficients& tmp = *reference;
    std::size_t s = 0;
    for (const BasisSlot& sl : bs.slots()) {
      if (L.manifold == Manifold::S2)
        ref[s] = tmp.get(sl.k1, sl.i);
      else if (L.manifold == Manifold::SO3)
        ref[s] = tmp.get(sl.k1, sl.i, sl.j);
      else
        ref[s] = tmp.get(sl.k1, sl.i, sl.k2, sl.j);
      ++s;
    }
  }
  const auto record = [&](double update) {
    tr.errors.push_back(reference ? (c - ref).norm() : update);
  };

  double prev_update = 0.0;
  int bad = 0;
  record(c.norm());
  for (int m = 0; m < max_steps; ++m) {
    const Eigen::VectorXd upd = g * (sf - rn * (M * (M.transpose() * c)));
    c += upd;
    const double un = upd.norm();
    tr.steps = m + 1;
    record(un);
    const double ratio = prev_update > 0.0 ? un / prev_update : 0.0;
    prev_update = un;
    const double est = un / (1.0 - std::min(0.999, std::max(ratio, 0.0)));
    if (est <= tol) {
      tr.converged = true;
      break;
    }
    if (m > 0) {
      bad = ratio >= 1.0 ? bad + 1 : 0;
      if (bad >= 3) {
        tr.contraction = detail::fitted_ratio(tr.errors);
        throw certification_error("frame_algorithm: diverging after " +
                                  std::to_string(tr.steps) + " steps (last ratio " +
                                  std::to_string(ratio) + ")");
      }
    }
  }
  tr.contraction = detail::fitted_ratio(tr.errors);
  return {detail::slots_to_harmonics(bs, c, L.manifold, omega), std::move(tr)};
}

}  // namespace manirad
