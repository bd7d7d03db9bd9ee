#pragma once

// Variational splines: minimal (I - a Delta)^{t/2} norm interpolants of
// finitely many functional values. The Gram matrix
//
//   beta_{nu mu} = sum_slots (1 + a lambda)^{-t} F_nu(u_slot) F_mu(u_slot)
//
// collapses, per degree, to closed forms through the addition theorem
// (Legendre kernels on spheres, characters on SO(3)), so assembly never
// evaluates individual basis slots. Spline coefficients are
// (1 + a lambda)^{-t} sum_nu alpha_nu F_nu(u_slot) with beta alpha = v.
//
// Everything is truncated at one shared degree K_max (adaptive, capped), so
// interpolation residuals and the orthogonality identity hold to rounding by
// construction; truncation only perturbs the spline relative to its ideal
// infinite series, and the achieved tail ratio is recorded in diagnostics.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "manirad/geometry.hpp"
#include "manirad/spaces.hpp"
#include "manirad/transforms.hpp"

namespace manirad {

struct PointEvalF {
  Point p;
};
struct SymPointPairF {  // f -> f(x) + f(-x)
  Vec3 x = Vec3::UnitZ();
};
struct CircleIntegralF {  // mean over a great circle
  GreatCircle circle;
};
struct HemisphereIntegralF {  // integral over {v . pole > 0}, half mass
  Vec3 pole = Vec3::UnitZ();
};
struct SO3CircleIntegralF {  // mean over {g : gy = x}
  Vec3 x = Vec3::UnitZ();
  Vec3 y = Vec3::UnitZ();
};

using Functional = std::variant<PointEvalF, SymPointPairF, CircleIntegralF,
                                HemisphereIntegralF, SO3CircleIntegralF>;

struct FunctionalSet {
  Manifold manifold = Manifold::S2;
  std::vector<Functional> items;

  std::size_t size() const { return items.size(); }
};

namespace detail {

inline bool kind_allowed(Manifold m, const Functional& f) {
  if (const auto* pe = std::get_if<PointEvalF>(&f)) return point_manifold(pe->p) == m;
  if (std::holds_alternative<SO3CircleIntegralF>(f)) return m == Manifold::SO3;
  return m == Manifold::S2;  // sympair / circle / hemisphere anchors on S2
}

// Geometric distance between same-kind functionals; +inf across kinds.
// Used only for the pairwise-distinctness certificate.
inline double functional_distance(const Functional& a, const Functional& b) {
  if (a.index() != b.index()) return 1e18;
  if (const auto* pa = std::get_if<PointEvalF>(&a))
    return geodesic_distance(pa->p, std::get<PointEvalF>(b).p);
  if (const auto* sa = std::get_if<SymPointPairF>(&a)) {
    const Vec3& x = sa->x;
    const Vec3& y = std::get<SymPointPairF>(b).x;
    return std::min(s2_distance(x, y), s2_distance(x, Vec3(-y)));
  }
  if (const auto* ca = std::get_if<CircleIntegralF>(&a)) {
    const Vec3& x = ca->circle.pole;
    const Vec3& y = std::get<CircleIntegralF>(b).circle.pole;
    return std::min(s2_distance(x, y), s2_distance(x, Vec3(-y)));
  }
  if (const auto* ha = std::get_if<HemisphereIntegralF>(&a))
    return s2_distance(ha->pole, std::get<HemisphereIntegralF>(b).pole);
  const auto& oa = std::get<SO3CircleIntegralF>(a);
  const auto& ob = std::get<SO3CircleIntegralF>(b);
  // (x, y) and (-x, -y) cut the same circle
  const double direct = std::hypot(s2_distance(oa.x, ob.x), s2_distance(oa.y, ob.y));
  const double flipped =
      std::hypot(s2_distance(oa.x, Vec3(-ob.x)), s2_distance(oa.y, Vec3(-ob.y)));
  return std::min(direct, flipped);
}

}  // namespace detail

inline void validate_functional_set(const FunctionalSet& fs) {
  if (fs.items.empty()) throw precondition_error("functional set is empty");
  for (const Functional& f : fs.items)
    if (!detail::kind_allowed(fs.manifold, f))
      throw precondition_error("functional kind not defined on " +
                               manifold_name(fs.manifold));
  for (std::size_t i = 0; i < fs.items.size(); ++i)
    for (std::size_t j = i + 1; j < fs.items.size(); ++j)
      if (detail::functional_distance(fs.items[i], fs.items[j]) < 1e-10)
        throw precondition_error("functionals " + std::to_string(i) + " and " +
                                 std::to_string(j) + " coincide");
}

// ---------------------------------------------------------------------------
// Spectral application of a functional to a coefficient object. Exact for
// the stored blocks; no quadrature anywhere.

inline double functional_apply(const Functional& f, const HarmonicCoefficients& c) {
  if (const auto* pe = std::get_if<PointEvalF>(&f)) return synthesize_at(c, pe->p);
  if (const auto* sp = std::get_if<SymPointPairF>(&f)) {
    if (c.manifold() != Manifold::S2) throw precondition_error("sympair needs S2");
    return synthesize_at(c, Point(sp->x)) + synthesize_at(c, Point(Vec3(-sp->x)));
  }
  if (const auto* ci = std::get_if<CircleIntegralF>(&f)) {
    if (c.manifold() != Manifold::S2) throw precondition_error("circle needs S2");
    return synthesize_at(funk_radon_forward(c), Point(ci->circle.pole));
  }
  if (const auto* he = std::get_if<HemisphereIntegralF>(&f)) {
    if (c.manifold() != Manifold::S2) throw precondition_error("hemisphere needs S2");
    return synthesize_at(hemispherical_forward(c), Point(he->pole));
  }
  const auto& oc = std::get<SO3CircleIntegralF>(f);
  if (c.manifold() != Manifold::SO3) throw precondition_error("so3 circle needs SO(3)");
  return synthesize_at(so3_radon_forward(c), Point(ProductPoint{oc.x, oc.y}));
}

// ---------------------------------------------------------------------------
// Truncation control.

inline int spline_degree_cap(Manifold m) {
  switch (m) {
    case Manifold::S2: return 200;
    case Manifold::SO3: return wigner_degree_cap;
    case Manifold::S2xS2: return 64;  // triangle k1 + k2 <= K storage bound
  }
  return 0;
}

namespace detail {

// Slot multiplicity of one total degree: 2k+1 slots on S2, (2k+1)^2 on
// SO(3); on the product the shell s = k1 + k2 carries
// sum_{k1} (2k1+1)(2(s-k1)+1) = (2/3) s (s+1)(s-1) + (s+1)(2s+1) slots.
inline double degree_multiplicity(Manifold m, int k) {
  const double d = 2.0 * k + 1.0;
  switch (m) {
    case Manifold::S2: return d;
    case Manifold::SO3: return d * d;
    case Manifold::S2xS2:
      return (2.0 / 3.0) * k * (k + 1.0) * (k - 1.0) + (k + 1.0) * (2.0 * k + 1.0);
  }
  return 0.0;
}

// Smallest eigenvalue sum lambda1 + lambda2 on the shell k1 + k2 = s
// (balanced split); used to upper-bound product-manifold tails.
inline double shell_lambda_min(Manifold m, int k) {
  if (m != Manifold::S2xS2) return degree_lambda(k);
  const int h = k / 2;
  return degree_lambda(h) + degree_lambda(k - h);
}

inline double tail_weight(Manifold m, int k, double t, double a) {
  return degree_multiplicity(m, k) * std::pow(1.0 + a * shell_lambda_min(m, k), -t);
}

}  // namespace detail

// Doubles K until the point-functional tail sum_{k > K} drops below 1e-12 of
// the truncated diagonal, then clamps at the manifold cap. Small t cannot
// always reach the target before the cap; the achieved ratio is returned and
// carried into the spline diagnostics.
inline int choose_kmax(Manifold m, double t, double a = -1.0,
                       double* tail_ratio_out = nullptr) {
  if (a < 0.0) a = sobolev_scale(m);
  const double tmin = manifold_dim(m) / 2.0;
  if (!(t > tmin))
    throw precondition_error("spline smoothness t must exceed dim/2 = " +
                             std::to_string(tmin));
  const int cap = spline_degree_cap(m);
  int K = 8;
  double ratio = 1.0;
  for (;;) {
    K = std::min(K, cap);
    double diag = 0.0;
    for (int k = 0; k <= K; ++k) diag += detail::tail_weight(m, k, t, a);
    double tail = 0.0;
    for (int k = K + 1; k <= 2000000; ++k) {
      const double term = detail::tail_weight(m, k, t, a);
      tail += term;
      if (term < 1e-17 * diag && k > 2 * K) break;
    }
    ratio = tail / diag;
    if (ratio < 1e-12 || K == cap) break;
    K *= 2;
  }
  if (tail_ratio_out) *tail_ratio_out = ratio;
  return K;
}

// ---------------------------------------------------------------------------
// Canonical slot enumeration of the truncated space: blocks in key order,
// column-major inside each block. Shared by the moment columns, the
// coefficient synthesis, and the stable solver, so indices always agree.

struct SlotTable {
  Manifold manifold = Manifold::S2;
  int K = 0;
  struct Block {
    int k1, k2, rows, cols;
    std::size_t offset;
  };
  std::vector<Block> blocks;
  std::size_t total = 0;
};

inline SlotTable make_slot_table(Manifold m, int K) {
  SlotTable st;
  st.manifold = m;
  st.K = K;
  std::size_t off = 0;
  auto push = [&](int k1, int k2, int r, int c) {
    st.blocks.push_back({k1, k2, r, c, off});
    off += static_cast<std::size_t>(r) * c;
  };
  switch (m) {
    case Manifold::S2:
      for (int k = 0; k <= K; ++k) push(k, 0, 2 * k + 1, 1);
      break;
    case Manifold::SO3:
      for (int k = 0; k <= K; ++k) push(k, 0, 2 * k + 1, 2 * k + 1);
      break;
    case Manifold::S2xS2:
      for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 + k1 <= K; ++k2) push(k1, k2, 2 * k1 + 1, 2 * k2 + 1);
      break;
  }
  st.total = off;
  return st;
}

// ---------------------------------------------------------------------------
// Gram assembly via per-degree closed forms.

namespace detail {

// On S2 every functional is (anchor, per-degree profile):
//   point 1; sympair 1 + (-1)^k; circle mu^R_k; hemisphere mu^T_k.
struct S2Profile {
  Vec3 anchor;
  const double* profile;  // length K+1, may alias shared tables
};

struct GramContext {
  int K = 0;
  double t = 0.0, a = 1.0;
  std::vector<double> weight;    // (1 + a lambda_k)^{-t}
  std::vector<double> ones, par; // point / sympair profiles
  MultiplierTable fr, hemi;

  explicit GramContext(Manifold m, double t_, double a_, int K_)
      : K(K_), t(t_), a(a_), fr(funk_radon_multipliers(K_)),
        hemi(hemispherical_multipliers(K_)) {
    weight.resize(K + 1);
    ones.assign(K + 1, 1.0);
    par.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
      weight[k] = std::pow(1.0 + a * degree_lambda(k), -t);
      par[k] = (k % 2 == 0) ? 2.0 : 0.0;
    }
  }

  S2Profile s2_profile(const Functional& f) const {
    if (const auto* pe = std::get_if<PointEvalF>(&f))
      return {std::get<Vec3>(pe->p), ones.data()};
    if (const auto* sp = std::get_if<SymPointPairF>(&f)) return {sp->x, par.data()};
    if (const auto* ci = std::get_if<CircleIntegralF>(&f))
      return {ci->circle.pole, fr.entries.data()};
    return {std::get<HemisphereIntegralF>(f).pole, hemi.entries.data()};
  }
};

inline double gram_entry_s2(const GramContext& g, const Functional& fa,
                            const Functional& fb) {
  const S2Profile a = g.s2_profile(fa), b = g.s2_profile(fb);
  const std::vector<double> P = legendre_all(g.K, a.anchor.dot(b.anchor));
  double s = 0.0;
  for (int k = g.K; k >= 0; --k)
    s += g.weight[k] * a.profile[k] * b.profile[k] * (2.0 * k + 1.0) * P[k];
  return s;
}

inline double gram_entry_so3(const GramContext& g, const Functional& fa,
                             const Functional& fb) {
  const auto* pa = std::get_if<PointEvalF>(&fa);
  const auto* pb = std::get_if<PointEvalF>(&fb);
  double s = 0.0;
  if (pa && pb) {
    const double th = geodesic_distance(pa->p, pb->p);
    for (int k = g.K; k >= 0; --k)
      s += g.weight[k] * (2.0 * k + 1.0) * so3_character(k, th);
    return s;
  }
  if (!pa && !pb) {
    const auto& ca = std::get<SO3CircleIntegralF>(fa);
    const auto& cb = std::get<SO3CircleIntegralF>(fb);
    const std::vector<double> Px = legendre_all(g.K, ca.x.dot(cb.x));
    const std::vector<double> Py = legendre_all(g.K, ca.y.dot(cb.y));
    for (int k = g.K; k >= 0; --k)
      s += g.weight[k] * (2.0 * k + 1.0) * Px[k] * Py[k];
    return s;
  }
  // point g against circle (x, y): sum_k w_k (2k+1) P_k(x . (g y))
  const auto& pt = pa ? *pa : *pb;
  const auto& ci = pa ? std::get<SO3CircleIntegralF>(fb) : std::get<SO3CircleIntegralF>(fa);
  const Vec3 gy = std::get<RotationPoint>(pt.p).matrix() * ci.y;
  const std::vector<double> P = legendre_all(g.K, ci.x.dot(gy));
  for (int k = g.K; k >= 0; --k) s += g.weight[k] * (2.0 * k + 1.0) * P[k];
  return s;
}

inline double gram_entry_s2xs2(const GramContext& g, const Functional& fa,
                               const Functional& fb) {
  const auto& a = std::get<PointEvalF>(fa);
  const auto& b = std::get<PointEvalF>(fb);
  const auto& pa = std::get<ProductPoint>(a.p);
  const auto& pb = std::get<ProductPoint>(b.p);
  const std::vector<double> P1 = legendre_all(g.K, pa.a.dot(pb.a));
  const std::vector<double> P2 = legendre_all(g.K, pa.b.dot(pb.b));
  double s = 0.0;
  for (int k1 = 0; k1 <= g.K; ++k1) {
    const double l1 = degree_lambda(k1);
    double inner = 0.0;
    for (int k2 = 0; k2 <= g.K - k1; ++k2)
      inner += std::pow(1.0 + g.a * (l1 + degree_lambda(k2)), -g.t) *
               (2.0 * k2 + 1.0) * P2[k2];
    s += (2.0 * k1 + 1.0) * P1[k1] * inner;
  }
  return s;
}

// F_nu(u_slot) for every slot of the table, in canonical order.
inline void moment_column(const SlotTable& st, const Functional& f,
                          const GramContext& ctx, Eigen::VectorXd& out) {
  out.resize(st.total);
  if (st.manifold == Manifold::S2) {
    const S2Profile pr = ctx.s2_profile(f);
    const SphBlock sb = sph_block(st.K, pr.anchor);
    for (const auto& b : st.blocks)
      for (int i = 1; i <= b.rows; ++i)
        out[b.offset + i - 1] = pr.profile[b.k1] * sb.at(b.k1, i);
    return;
  }
  if (st.manifold == Manifold::SO3) {
    if (const auto* pe = std::get_if<PointEvalF>(&f)) {
      const auto d = wigner_matrices(st.K, std::get<RotationPoint>(pe->p));
      for (const auto& b : st.blocks) {
        Eigen::Map<Eigen::MatrixXd>(out.data() + b.offset, b.rows, b.cols) =
            std::sqrt(2.0 * b.k1 + 1.0) * d[b.k1].transpose();
      }
      return;
    }
    const auto& ci = std::get<SO3CircleIntegralF>(f);
    const SphBlock bx = sph_block(st.K, ci.x), by = sph_block(st.K, ci.y);
    for (const auto& b : st.blocks) {
      Eigen::VectorXd vx(b.rows), vy(b.cols);
      for (int i = 1; i <= b.rows; ++i) vx[i - 1] = bx.at(b.k1, i);
      for (int j = 1; j <= b.cols; ++j) vy[j - 1] = by.at(b.k1, j);
      Eigen::Map<Eigen::MatrixXd>(out.data() + b.offset, b.rows, b.cols) =
          (vx * vy.transpose()) / std::sqrt(2.0 * b.k1 + 1.0);
    }
    return;
  }
  const auto& pp = std::get<ProductPoint>(std::get<PointEvalF>(f).p);
  const SphBlock ba = sph_block(st.K, pp.a), bb = sph_block(st.K, pp.b);
  for (const auto& b : st.blocks) {
    Eigen::VectorXd va(b.rows), vb(b.cols);
    for (int i = 1; i <= b.rows; ++i) va[i - 1] = ba.at(b.k1, i);
    for (int j = 1; j <= b.cols; ++j) vb[j - 1] = bb.at(b.k2, j);
    Eigen::Map<Eigen::MatrixXd>(out.data() + b.offset, b.rows, b.cols) =
        va * vb.transpose();
  }
}

inline Eigen::VectorXd slot_weights(const SlotTable& st, double t, double a) {
  Eigen::VectorXd w(st.total);
  for (const auto& b : st.blocks) {
    const double lam = block_lambda(st.manifold, b.k1, b.k2);
    w.segment(b.offset, static_cast<std::size_t>(b.rows) * b.cols)
        .setConstant(std::pow(1.0 + a * lam, -t));
  }
  return w;
}

inline HarmonicCoefficients slots_to_coefficients(const SlotTable& st,
                                                  const Eigen::VectorXd& c_slots) {
  HarmonicCoefficients c(st.manifold, degree_lambda(st.K));
  for (const auto& b : st.blocks) {
    const auto m = Eigen::Map<const Eigen::MatrixXd>(c_slots.data() + b.offset, b.rows,
                                                     b.cols);
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    c.block(b.k1, st.manifold == Manifold::S2xS2 ? b.k2 : 0) = m;
  }
  return c;
}

}  // namespace detail

inline Eigen::MatrixXd assemble_gram(const FunctionalSet& fs, double t, int kmax,
                                     double a = -1.0) {
  validate_functional_set(fs);
  if (a < 0.0) a = sobolev_scale(fs.manifold);
  const double tmin = manifold_dim(fs.manifold) / 2.0;
  if (!(t > tmin))
    throw precondition_error("spline smoothness t must exceed dim/2 = " +
                             std::to_string(tmin));
  const detail::GramContext ctx(fs.manifold, t, a, kmax);
  const std::size_t N = fs.size();
  Eigen::MatrixXd beta(N, N);
  parallel_for(N, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double e = 0.0;
      switch (fs.manifold) {
        case Manifold::S2: e = detail::gram_entry_s2(ctx, fs.items[i], fs.items[j]); break;
        case Manifold::SO3: e = detail::gram_entry_so3(ctx, fs.items[i], fs.items[j]); break;
        case Manifold::S2xS2:
          e = detail::gram_entry_s2xs2(ctx, fs.items[i], fs.items[j]);
          break;
      }
      beta(i, j) = beta(j, i) = e;
    }
  });
  return beta;
}

// ---------------------------------------------------------------------------
// Spline object and solve.

struct SplineDiagnostics {
  double tail_ratio = 0.0;     // truncated tail / diagonal, from choose_kmax
  double residual_inf = 0.0;   // || beta alpha - v ||_inf after refinement
  double cond_estimate = 0.0;  // (max/min Cholesky pivot)^2
};

struct Spline {
  enum class SolvePath { cholesky, whitened_qr };

  FunctionalSet functionals;
  double t = 0.0;
  double a = 1.0;
  int kmax = 0;
  Eigen::VectorXd values;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd beta;
  HarmonicCoefficients coefficients;
  SplineDiagnostics diag;
  SolvePath path = SolvePath::cholesky;
};

namespace detail {

// coefficients(slot) = (1 + a lambda)^{-t} sum_nu alpha_nu F_nu(u_slot).
inline HarmonicCoefficients spline_coefficients(const FunctionalSet& fs,
                                                const Eigen::VectorXd& alpha, double t,
                                                double a, const SlotTable& st) {
  const GramContext ctx(fs.manifold, t, a, st.K);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(st.total), col;
  for (std::size_t nu = 0; nu < fs.size(); ++nu) {
    moment_column(st, fs.items[nu], ctx, col);
    acc += alpha[nu] * col;
  }
  return slots_to_coefficients(st, slot_weights(st, t, a).cwiseProduct(acc));
}

}  // namespace detail

// The Gram system is solved by Cholesky plus one refinement step. Large t
// makes the kernel matrix exponentially ill conditioned even though the
// interpolant itself stays tame, so when that route cannot certify the
// residual the solver reformulates: the spline is the minimum-norm solution
// of A u = v for the whitened moment matrix A(nu, slot) = w^{1/2} F_nu,
// u = w^{-1/2} c, computed by a rank-revealing orthogonal factorization.
// That route is backward stable (residual scales with |u|, not cond(A)),
// never regularizes, and still certifies the interpolation residual.
inline Spline solve_spline(const FunctionalSet& fs, const Eigen::VectorXd& v, double t,
                           double a = -1.0, int kmax_override = 0) {
  if (static_cast<std::size_t>(v.size()) != fs.size())
    throw precondition_error("solve_spline: |values| != |functionals|");
  Spline s;
  s.functionals = fs;
  s.t = t;
  s.a = a < 0.0 ? sobolev_scale(fs.manifold) : a;
  s.kmax = kmax_override > 0 ? kmax_override
                             : choose_kmax(fs.manifold, t, s.a, &s.diag.tail_ratio);
  s.values = v;
  s.beta = assemble_gram(fs, t, s.kmax, s.a);
  const double vmax = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double rtol = 1e-10;

  Eigen::LLT<Eigen::MatrixXd> llt(s.beta);
  if (llt.info() == Eigen::Success) {
    const auto& L = llt.matrixLLT();
    double pmax = 0.0, pmin = 1e300;
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
      pmax = std::max(pmax, L(i, i));
      pmin = std::min(pmin, L(i, i));
    }
    s.diag.cond_estimate = (pmax / pmin) * (pmax / pmin);
    s.alpha = llt.solve(v);
    s.alpha += llt.solve(v - s.beta * s.alpha);  // one refinement step
    s.diag.residual_inf = (s.beta * s.alpha - v).cwiseAbs().maxCoeff();
    if (s.diag.residual_inf <= rtol * vmax || vmax == 0.0) {
      const SlotTable st = make_slot_table(fs.manifold, s.kmax);
      s.coefficients = detail::spline_coefficients(fs, s.alpha, t, s.a, st);
      s.path = Spline::SolvePath::cholesky;
      return s;
    }
  }

  // Whitened minimum-norm fallback. Raise K if the truncated space cannot
  // hold |F| independent functionals.
  int K = s.kmax;
  SlotTable st = make_slot_table(fs.manifold, K);
  while (st.total < fs.size() && K < spline_degree_cap(fs.manifold)) {
    K = std::min(2 * K, spline_degree_cap(fs.manifold));
    st = make_slot_table(fs.manifold, K);
  }
  if (st.total < fs.size())
    throw certification_error("solve_spline: more functionals than basis slots at the "
                              "degree cap");
  if (st.total * fs.size() > std::size_t(40000000))
    throw certification_error("solve_spline: stable fallback system too large");
  s.kmax = K;

  const detail::GramContext ctx(fs.manifold, t, s.a, K);
  const Eigen::VectorXd w = detail::slot_weights(st, t, s.a);
  const Eigen::VectorXd sqw = w.cwiseSqrt();
  Eigen::MatrixXd A(fs.size(), st.total);
  parallel_for(fs.size(), [&](std::size_t nu) {
    Eigen::VectorXd col;
    detail::moment_column(st, fs.items[nu], ctx, col);
    A.row(nu) = col.cwiseProduct(sqw).transpose();
  });

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd u = cod.solve(v);
  u += cod.solve(v - A * u);
  s.diag.residual_inf = (A * u - v).cwiseAbs().maxCoeff();
  {
    const auto& T = cod.matrixT();
    double tmax = 0.0, tmin = 1e300;
    for (Eigen::Index i = 0; i < cod.rank(); ++i) {
      tmax = std::max(tmax, std::fabs(T(i, i)));
      tmin = std::min(tmin, std::fabs(T(i, i)));
    }
    s.diag.cond_estimate = (tmax / tmin) * (tmax / tmin);
  }
  if (vmax > 0.0 && s.diag.residual_inf > rtol * vmax)
    throw certification_error(
        "solve_spline: interpolation residual " + std::to_string(s.diag.residual_inf) +
        " not certified (rank " + std::to_string(cod.rank()) + " of " +
        std::to_string(fs.size()) + "); functionals may coincide numerically");
  s.alpha = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(s.beta).solve(v);
  s.coefficients = detail::slots_to_coefficients(st, sqw.cwiseProduct(u));
  s.path = Spline::SolvePath::whitened_qr;
  return s;
}

inline Spline interpolate_function(const HarmonicCoefficients& f, const FunctionalSet& fs,
                                   double t, double a = -1.0) {
  Eigen::VectorXd v(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) v[i] = functional_apply(fs.items[i], f);
  return solve_spline(fs, v, t, a);
}

// ---------------------------------------------------------------------------
// Spline-based approximate inversion of the two Radon transforms.

// Samples of Rf on an antipodally closed point set; f is recovered through
// the even spline interpolant at tau = 2^{l+1} + t + 1/2. Point pairs are
// folded into symmetric-pair functionals (the minimal interpolant of even
// data is even, so the folded problem has the same solution at half the
// size), after which the multiplier inversion applies degree by degree.
inline HarmonicCoefficients spline_inversion_funk_radon(const std::vector<Vec3>& pts,
                                                        const std::vector<double>& values,
                                                        double t, int l) {
  if (pts.size() != values.size() || pts.empty())
    throw precondition_error("funk-radon inversion: bad sample arrays");
  std::vector<bool> used(pts.size(), false);
  FunctionalSet fs;
  fs.manifold = Manifold::S2;
  Eigen::VectorXd v(pts.size() / 2 + 1);
  std::size_t n = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    std::size_t partner = pts.size();
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (!used[j] && (pts[i] + pts[j]).norm() < 1e-9) {
        partner = j;
        break;
      }
    if (partner == pts.size())
      throw precondition_error("funk-radon inversion: sample set is not symmetric");
    used[i] = used[partner] = true;
    if (n >= static_cast<std::size_t>(v.size()))
      throw precondition_error("funk-radon inversion: pairing failed");
    fs.items.push_back(SymPointPairF{pts[i]});
    v[n++] = values[i] + values[partner];
  }
  const double tau = std::pow(2.0, l + 1) + t + 0.5;
  const Spline s = solve_spline(fs, v.head(n), tau);
  return funk_radon_inverse(s.coefficients);
}

// Samples of the SO(3) Radon image at product points; the spline on S2xS2 at
// tau = 2^{l+2} + (t+1) is projected onto the diagonal (k, k) blocks before
// the multiplier inversion.
inline HarmonicCoefficients spline_inversion_so3(const std::vector<ProductPoint>& pts,
                                                 const std::vector<double>& values,
                                                 double t, int l) {
  if (pts.size() != values.size() || pts.empty())
    throw precondition_error("so3 inversion: bad sample arrays");
  FunctionalSet fs;
  fs.manifold = Manifold::S2xS2;
  for (const ProductPoint& p : pts) fs.items.push_back(PointEvalF{Point(p)});
  Eigen::VectorXd v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = values[i];
  const double tau = std::pow(2.0, l + 2) + (t + 1.0);
  const Spline s = solve_spline(fs, v, tau);
  HarmonicCoefficients diag(Manifold::S2xS2, s.coefficients.omega());
  for (const auto& [key, blk] : s.coefficients.blocks())
    if (key.first == key.second) diag.block(key.first, key.second) = blk;
  return so3_radon_inverse(diag);
}

// ---------------------------------------------------------------------------
// Optimality certificate. The spline is the minimal-norm interpolant and the
// symmetry center of the convex set of interpolants with bounded norm, so it
// must be H_t-orthogonal to the null space of the functional map. Trials
// perturb f by random null directions (random bandlimited function minus its
// own interpolating spline at the same truncation) and sample the interpolant
// set together with its reflections through the spline.

struct OptimalityReport {
  int trials = 0;
  double max_orthogonality_defect = 0.0;  // |<s, h - s>_t| / (|s|_t |h - s|_t)
  double max_norm_deficit = 0.0;          // max over trials of |s|_t - |h|_t
  double empirical_diameter = 0.0;        // over sampled interpolants + reflections
  double max_center_distance = 0.0;       // max |s - h|_t over the sample
  double norm_bound = 0.0;                // largest sampled interpolant norm
  bool minimal = true;
};

inline OptimalityReport optimality_check(const Spline& s, const HarmonicCoefficients& f,
                                         int trials, Rng& rng) {
  for (std::size_t i = 0; i < s.functionals.size(); ++i) {
    const double fv = functional_apply(s.functionals.items[i], f);
    const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
    if (std::fabs(fv - s.values[i]) > 1e-8 * scale)
      throw precondition_error("optimality_check: spline does not interpolate f");
  }
  OptimalityReport rep;
  rep.trials = trials;
  const double snorm = sobolev_norm(s.coefficients, s.t, s.a);
  rep.norm_bound = snorm;
  if (trials <= 0) return rep;
  const double h_omega = degree_lambda(std::min(8, s.kmax));
  for (int trial = 0; trial < trials; ++trial) {
    const HarmonicCoefficients g =
        random_coefficients(s.functionals.manifold, h_omega, rng);
    Eigen::VectorXd w(s.functionals.size());
    for (std::size_t i = 0; i < s.functionals.size(); ++i)
      w[i] = functional_apply(s.functionals.items[i], g);
    const Spline corr = solve_spline(s.functionals, w, s.t, s.a, s.kmax);
    // null direction: F_nu(d) = 0 up to the solver residual
    const HarmonicCoefficients d = linear_combination(1.0, g, -1.0, corr.coefficients);
    const HarmonicCoefficients h = linear_combination(1.0, f, 1.0, d);

    const HarmonicCoefficients hs = linear_combination(1.0, h, -1.0, s.coefficients);
    const double inner = sobolev_inner(s.coefficients, hs, s.t, s.a);
    const double hsnorm = sobolev_norm(hs, s.t, s.a);
    if (snorm > 0.0 && hsnorm > 0.0)
      rep.max_orthogonality_defect =
          std::max(rep.max_orthogonality_defect, std::fabs(inner) / (snorm * hsnorm));

    // h and its reflection 2s - h are both interpolants; the pair spans a
    // diameter chord through the center.
    const double hnorm = sobolev_norm(h, s.t, s.a);
    const double refl = sobolev_norm(
        linear_combination(2.0, s.coefficients, -1.0, h), s.t, s.a);
    rep.norm_bound = std::max({rep.norm_bound, hnorm, refl});
    rep.empirical_diameter = std::max(rep.empirical_diameter, 2.0 * hsnorm);
    rep.max_center_distance = std::max(rep.max_center_distance, hsnorm);
    rep.max_norm_deficit = std::max(rep.max_norm_deficit, snorm - hnorm);
    if (snorm > hnorm + 1e-10) rep.minimal = false;
  }
  return rep;
}

}  // namespace manirad
