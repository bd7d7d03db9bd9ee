#pragma once

// Band-limited function spaces in coefficient form.
//
// A HarmonicCoefficients object stores a function as dense per-degree blocks
// against the orthonormal families of harmonics.hpp, together with a
// certified bandwidth omega: every stored block satisfies lambda <= omega
// (+ slack), lambda being the Laplace-Beltrami eigenvalue k(k+1), resp.
// k1(k1+1) + k2(k2+1) on the product.
//
// Block keys are (k, 0) on S^2 and SO(3) and (k1, k2) on S^2 x S^2; block
// shapes are (2k+1) x 1, (2k+1) x (2k+1) and (2k1+1) x (2k2+1). On SO(3)
// the slot (k,i,j) multiplies the orthonormal function whose Radon image is
// proportional to Y_k^i(x) Y_k^j(y); see transforms.hpp.

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "manirad/core.hpp"
#include "manirad/harmonics.hpp"

namespace manirad {

// Largest degree with k(k+1) <= omega + slack.
inline int max_degree_for(double omega) {
  if (omega < -bandwidth_slack) return -1;
  int k = static_cast<int>(std::floor((-1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, omega))) / 2.0));
  while (static_cast<double>(k + 1) * (k + 2) <= omega + bandwidth_slack) ++k;
  while (k > 0 && static_cast<double>(k) * (k + 1) > omega + bandwidth_slack) --k;
  return k;
}

inline double degree_lambda(int k) { return static_cast<double>(k) * (k + 1); }

inline double block_lambda(Manifold m, int k1, int k2) {
  if (m == Manifold::S2xS2) return degree_lambda(k1) + degree_lambda(k2);
  return degree_lambda(k1);
}

// Certified bandwidth of pointwise products fg for f in E_{omega1},
// g in E_{omega2}: exact degree additivity per factor.
inline double product_bandwidth(Manifold m, double omega1, double omega2) {
  const int K = max_degree_for(omega1) + max_degree_for(omega2);
  if (m == Manifold::S2xS2) return 2.0 * degree_lambda(K);
  return degree_lambda(K);
}

class HarmonicCoefficients {
 public:
  using Key = std::pair<int, int>;

  HarmonicCoefficients() = default;
  HarmonicCoefficients(Manifold m, double omega) : manifold_(m), omega_(omega) {
    if (omega < 0.0) throw precondition_error("bandwidth must be nonnegative");
  }

  Manifold manifold() const { return manifold_; }
  double omega() const { return omega_; }
  const std::map<Key, Eigen::MatrixXd>& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }

  // Creates the zero block on first touch; key must respect the bandwidth.
  Eigen::MatrixXd& block(int k1, int k2 = 0) {
    check_key(k1, k2);
    auto it = blocks_.find({k1, k2});
    if (it == blocks_.end()) {
      const auto [r, c] = block_shape(k1, k2);
      it = blocks_.emplace(Key{k1, k2}, Eigen::MatrixXd::Zero(r, c)).first;
    }
    return it->second;
  }

  double get(int k, int i) const {
    require(manifold_ == Manifold::S2, "get(k,i) is for S2");
    const auto* b = find(k, 0);
    return b ? (*b)(i - 1, 0) : 0.0;
  }
  void set(int k, int i, double v) {
    require(manifold_ == Manifold::S2, "set(k,i) is for S2");
    block(k)(i - 1, 0) = v;
  }

  double get(int k, int i, int j) const {
    if (manifold_ == Manifold::SO3) {
      const auto* b = find(k, 0);
      return b ? (*b)(i - 1, j - 1) : 0.0;
    }
    require(manifold_ == Manifold::S2xS2, "get(k,i,j) needs SO3 or S2xS2");
    const auto* b = find(k, k);
    return b ? (*b)(i - 1, j - 1) : 0.0;
  }
  void set(int k, int i, int j, double v) {
    if (manifold_ == Manifold::SO3) {
      block(k)(i - 1, j - 1) = v;
      return;
    }
    require(manifold_ == Manifold::S2xS2, "set(k,i,j) needs SO3 or S2xS2");
    block(k, k)(i - 1, j - 1) = v;
  }

  double get(int k1, int i, int k2, int j) const {
    require(manifold_ == Manifold::S2xS2, "4-index access is for S2xS2");
    const auto* b = find(k1, k2);
    return b ? (*b)(i - 1, j - 1) : 0.0;
  }
  void set(int k1, int i, int k2, int j, double v) {
    require(manifold_ == Manifold::S2xS2, "4-index access is for S2xS2");
    block(k1, k2)(i - 1, j - 1) = v;
  }

  // Largest degree present (max over both factors on the product).
  int max_degree() const {
    int K = 0;
    for (const auto& [key, b] : blocks_) K = std::max({K, key.first, key.second});
    return K;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [key, b] : blocks_) s += b.squaredNorm();
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  // Drops numerically empty blocks; keeps files and comparisons tidy.
  void prune(double tol = 0.0) {
    for (auto it = blocks_.begin(); it != blocks_.end();) {
      if (it->second.cwiseAbs().maxCoeff() <= tol)
        it = blocks_.erase(it);
      else
        ++it;
    }
  }

 private:
  static void require(bool ok, const char* msg) {
    if (!ok) throw precondition_error(msg);
  }
  std::pair<int, int> block_shape(int k1, int k2) const {
    switch (manifold_) {
      case Manifold::S2: return {2 * k1 + 1, 1};
      case Manifold::SO3: return {2 * k1 + 1, 2 * k1 + 1};
      case Manifold::S2xS2: return {2 * k1 + 1, 2 * k2 + 1};
    }
    return {0, 0};
  }
  void check_key(int k1, int k2) const {
    if (k1 < 0 || k2 < 0) throw precondition_error("negative degree");
    if (manifold_ != Manifold::S2xS2 && k2 != 0)
      throw precondition_error("second degree is only meaningful on S2xS2");
    if (block_lambda(manifold_, k1, manifold_ == Manifold::S2xS2 ? k2 : 0) >
        omega_ + bandwidth_slack)
      throw precondition_error("coefficient index exceeds certified bandwidth");
  }
  const Eigen::MatrixXd* find(int k1, int k2) const {
    auto it = blocks_.find({k1, k2});
    return it == blocks_.end() ? nullptr : &it->second;
  }

  Manifold manifold_ = Manifold::S2;
  double omega_ = 0.0;
  std::map<Key, Eigen::MatrixXd> blocks_;
};

// ---------------------------------------------------------------------------
// Flat enumeration of every basis slot with lambda <= omega. Shared by
// analysis, cubature moment systems and frame bound computations.

struct BasisSlot {
  int k1 = 0, i = 1, k2 = 0, j = 1;
};

class BasisSet {
 public:
  static BasisSet bandlimited(Manifold m, double omega) {
    BasisSet bs;
    bs.manifold_ = m;
    bs.omega_ = omega;
    const int K = max_degree_for(omega);
    if (m == Manifold::S2) {
      for (int k = 0; k <= K; ++k)
        for (int i = 1; i <= 2 * k + 1; ++i) bs.slots_.push_back({k, i, 0, 1});
    } else if (m == Manifold::SO3) {
      for (int k = 0; k <= K; ++k)
        for (int i = 1; i <= 2 * k + 1; ++i)
          for (int j = 1; j <= 2 * k + 1; ++j) bs.slots_.push_back({k, i, k, j});
    } else {
      for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
          if (degree_lambda(k1) + degree_lambda(k2) > omega + bandwidth_slack) continue;
          for (int i = 1; i <= 2 * k1 + 1; ++i)
            for (int j = 1; j <= 2 * k2 + 1; ++j) bs.slots_.push_back({k1, i, k2, j});
        }
    }
    return bs;
  }

  Manifold manifold() const { return manifold_; }
  double omega() const { return omega_; }
  std::size_t size() const { return slots_.size(); }
  const std::vector<BasisSlot>& slots() const { return slots_; }
  int max_degree() const { return max_degree_for(omega_); }

  // Values of every slot at one point, in enumeration order.
  Eigen::VectorXd evaluate_all(const Point& p) const {
    Eigen::VectorXd out(slots_.size());
    const int K = max_degree();
    if (manifold_ == Manifold::S2) {
      const SphBlock b = sph_block(K, std::get<Vec3>(p));
      for (std::size_t s = 0; s < slots_.size(); ++s)
        out[s] = b.at(slots_[s].k1, slots_[s].i);
    } else if (manifold_ == Manifold::SO3) {
      const auto d = wigner_matrices(K, std::get<RotationPoint>(p));
      for (std::size_t s = 0; s < slots_.size(); ++s) {
        const auto& sl = slots_[s];
        out[s] = std::sqrt(2.0 * sl.k1 + 1.0) * d[sl.k1](sl.j - 1, sl.i - 1);
      }
    } else {
      const auto& pp = std::get<ProductPoint>(p);
      const SphBlock ba = sph_block(K, pp.a);
      const SphBlock bb = sph_block(K, pp.b);
      for (std::size_t s = 0; s < slots_.size(); ++s) {
        const auto& sl = slots_[s];
        out[s] = ba.at(sl.k1, sl.i) * bb.at(sl.k2, sl.j);
      }
    }
    return out;
  }

  Eigen::VectorXd flatten(const HarmonicCoefficients& c) const {
    Eigen::VectorXd v(slots_.size());
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& sl = slots_[s];
      if (manifold_ == Manifold::S2)
        v[s] = c.get(sl.k1, sl.i);
      else if (manifold_ == Manifold::SO3)
        v[s] = c.get(sl.k1, sl.i, sl.j);
      else
        v[s] = c.get(sl.k1, sl.i, sl.k2, sl.j);
    }
    return v;
  }

  HarmonicCoefficients unflatten(const Eigen::VectorXd& v) const {
    HarmonicCoefficients c(manifold_, omega_);
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& sl = slots_[s];
      if (manifold_ == Manifold::S2)
        c.set(sl.k1, sl.i, v[s]);
      else if (manifold_ == Manifold::SO3)
        c.set(sl.k1, sl.i, sl.j, v[s]);
      else
        c.set(sl.k1, sl.i, sl.k2, sl.j, v[s]);
    }
    return c;
  }

 private:
  Manifold manifold_ = Manifold::S2;
  double omega_ = 0.0;
  std::vector<BasisSlot> slots_;
};

inline std::uint64_t weyl_dimension(Manifold m, double omega) {
  const int K = max_degree_for(omega);
  std::uint64_t n = 0;
  if (m == Manifold::S2) {
    for (int k = 0; k <= K; ++k) n += 2 * k + 1;
  } else if (m == Manifold::SO3) {
    for (int k = 0; k <= K; ++k) n += static_cast<std::uint64_t>(2 * k + 1) * (2 * k + 1);
  } else {
    for (int k1 = 0; k1 <= K; ++k1)
      for (int k2 = 0; k2 <= K; ++k2)
        if (degree_lambda(k1) + degree_lambda(k2) <= omega + bandwidth_slack)
          n += static_cast<std::uint64_t>(2 * k1 + 1) * (2 * k2 + 1);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Evaluation and analysis.

inline double synthesize_at(const HarmonicCoefficients& c, const Point& p) {
  if (point_manifold(p) != c.manifold())
    throw precondition_error("synthesize: point/coefficient manifold mismatch");
  const int K = c.max_degree();
  double acc = 0.0;
  if (c.manifold() == Manifold::S2) {
    const SphBlock b = sph_block(K, std::get<Vec3>(p));
    for (const auto& [key, blk] : c.blocks()) {
      const int k = key.first;
      for (int i = 1; i <= 2 * k + 1; ++i) acc += blk(i - 1, 0) * b.at(k, i);
    }
  } else if (c.manifold() == Manifold::SO3) {
    const auto d = wigner_matrices(K, std::get<RotationPoint>(p));
    for (const auto& [key, blk] : c.blocks()) {
      const int k = key.first;
      // slot (i,j) multiplies sqrt(2k+1) D_{ji}
      acc += std::sqrt(2.0 * k + 1.0) * blk.cwiseProduct(d[k].transpose()).sum();
    }
  } else {
    const auto& pp = std::get<ProductPoint>(p);
    const SphBlock ba = sph_block(K, pp.a);
    const SphBlock bb = sph_block(K, pp.b);
    for (const auto& [key, blk] : c.blocks()) {
      const auto [k1, k2] = key;
      Eigen::VectorXd va(2 * k1 + 1), vb(2 * k2 + 1);
      for (int i = 1; i <= 2 * k1 + 1; ++i) va[i - 1] = ba.at(k1, i);
      for (int j = 1; j <= 2 * k2 + 1; ++j) vb[j - 1] = bb.at(k2, j);
      acc += va.dot(blk * vb);
    }
  }
  return acc;
}

inline std::vector<double> synthesize(const HarmonicCoefficients& c,
                                      const std::vector<Point>& pts) {
  std::vector<double> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = synthesize_at(c, pts[i]); });
  return out;
}

// Weighted analysis c_s = sum_nu w_nu v_nu u_s(x_nu). The caller certifies
// that the (point, weight) family integrates E_{product_bandwidth(omega,
// omega)} exactly; exact_lambda carries that certificate. Per-point
// contributions are combined by a binary-counter pairwise reduction, so the
// summation order is fixed and balanced.
inline HarmonicCoefficients analyze(Manifold m, const std::vector<Point>& pts,
                                    const std::vector<double>& values,
                                    const std::vector<double>& weights,
                                    double omega, double exact_lambda) {
  if (pts.size() != values.size() || pts.size() != weights.size())
    throw precondition_error("analyze: mismatched array lengths");
  for (double w : weights)
    if (!(w > 0.0)) throw precondition_error("analyze: weights must be positive");
  if (exact_lambda + bandwidth_slack < product_bandwidth(m, omega, omega))
    throw precondition_error(
        "analyze: exactness certificate " + std::to_string(exact_lambda) +
        " below the required " + std::to_string(product_bandwidth(m, omega, omega)));

  const BasisSet bs = BasisSet::bandlimited(m, omega);
  std::vector<Eigen::VectorXd> contrib(pts.size());
  parallel_for(pts.size(), [&](std::size_t n) {
    contrib[n] = (weights[n] * values[n]) * bs.evaluate_all(pts[n]);
  });
  // binary-counter merge
  std::vector<Eigen::VectorXd> pending;
  std::vector<bool> used;
  for (std::size_t n = 0; n < contrib.size(); ++n) {
    Eigen::VectorXd cur = std::move(contrib[n]);
    std::size_t level = 0;
    while (level < pending.size() && used[level]) {
      cur += pending[level];
      used[level] = false;
      ++level;
    }
    if (level == pending.size()) {
      pending.emplace_back();
      used.push_back(false);
    }
    pending[level] = std::move(cur);
    used[level] = true;
  }
  Eigen::VectorXd total = Eigen::VectorXd::Zero(bs.size());
  for (std::size_t l = 0; l < pending.size(); ++l)
    if (used[l]) total += pending[l];
  return bs.unflatten(total);
}

// Sobolev (graph) norm via the multiplier (1 + a lambda)^t; `a` defaults to
// the manifold's operator scale.
inline double sobolev_norm(const HarmonicCoefficients& c, double t, double a = -1.0) {
  if (a < 0.0) a = sobolev_scale(c.manifold());
  double s = 0.0;
  for (const auto& [key, blk] : c.blocks()) {
    const double lam = block_lambda(c.manifold(), key.first, key.second);
    s += std::pow(1.0 + a * lam, t) * blk.squaredNorm();
  }
  return std::sqrt(s);
}

inline double sobolev_inner(const HarmonicCoefficients& c1, const HarmonicCoefficients& c2,
                            double t, double a = -1.0) {
  if (c1.manifold() != c2.manifold())
    throw precondition_error("sobolev_inner: manifold mismatch");
  if (a < 0.0) a = sobolev_scale(c1.manifold());
  const auto& small = c1.blocks().size() <= c2.blocks().size() ? c1 : c2;
  const auto& big = c1.blocks().size() <= c2.blocks().size() ? c2 : c1;
  double s = 0.0;
  for (const auto& [key, blk] : small.blocks()) {
    const auto it = big.blocks().find(key);
    if (it == big.blocks().end()) continue;
    const double lam = block_lambda(c1.manifold(), key.first, key.second);
    s += std::pow(1.0 + a * lam, t) * blk.cwiseProduct(it->second).sum();
  }
  return s;
}

inline HarmonicCoefficients linear_combination(double cx, const HarmonicCoefficients& x,
                                               double cy, const HarmonicCoefficients& y) {
  if (x.manifold() != y.manifold())
    throw precondition_error("linear_combination: manifold mismatch");
  HarmonicCoefficients out(x.manifold(), std::max(x.omega(), y.omega()));
  for (const auto& [key, blk] : x.blocks()) out.block(key.first, key.second) = cx * blk;
  for (const auto& [key, blk] : y.blocks()) {
    Eigen::MatrixXd& b = out.block(key.first, key.second);
    b += cy * blk;
  }
  return out;
}

inline HarmonicCoefficients project_bandlimit(const HarmonicCoefficients& c, double omega) {
  HarmonicCoefficients out(c.manifold(), std::min(omega, c.omega()));
  for (const auto& [key, blk] : c.blocks()) {
    if (block_lambda(c.manifold(), key.first, key.second) <= omega + bandwidth_slack)
      out.block(key.first, key.second) = blk;
  }
  return out;
}

// iid standard normal coefficients on every slot with lambda <= omega.
inline HarmonicCoefficients random_coefficients(Manifold m, double omega, Rng& rng) {
  const BasisSet bs = BasisSet::bandlimited(m, omega);
  Eigen::VectorXd v(bs.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) v[s] = rng.normal();
  return bs.unflatten(v);
}

}  // namespace manirad
