#pragma once

// Shared vocabulary for the library: the three supported manifolds, their
// point types, geodesic metrics, error taxonomy, and small deterministic
// utilities (RNG, pairwise summation, bounded parallel loops).
//
// Conventions used throughout:
//   * every manifold carries its probability measure (normalized surface
//     measure on S^2, normalized Haar on SO(3), products thereof), and
//   * all basis families are orthonormal with respect to that measure.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace manirad {

inline constexpr const char* version_string = "0.1.0";

// Slack for certified bandwidth comparisons: lambda <= omega + slack.
inline constexpr double bandwidth_slack = 1e-9;

inline constexpr double pi = 3.14159265358979323846264338327950288;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Manifold { S2, S2xS2, SO3 };

inline int manifold_dim(Manifold m) {
  switch (m) {
    case Manifold::S2: return 2;
    case Manifold::SO3: return 3;
    case Manifold::S2xS2: return 4;
  }
  return 0;
}

// Scale of the elliptic operator wired to each manifold: (I - a*Delta).
// The factor is what makes the Radon intertwining relations exact.
inline double sobolev_scale(Manifold m) {
  switch (m) {
    case Manifold::S2: return 1.0;
    case Manifold::S2xS2: return 2.0;
    case Manifold::SO3: return 4.0;
  }
  return 1.0;
}

inline std::string manifold_name(Manifold m) {
  switch (m) {
    case Manifold::S2: return "S2";
    case Manifold::S2xS2: return "S2xS2";
    case Manifold::SO3: return "SO3";
  }
  return "?";
}

inline bool parse_manifold(const std::string& s, Manifold& out) {
  if (s == "S2") { out = Manifold::S2; return true; }
  if (s == "S2xS2") { out = Manifold::S2xS2; return true; }
  if (s == "SO3") { out = Manifold::SO3; return true; }
  return false;
}

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto its exit codes, the library throws them.

// Violated mathematical precondition (wrong parity content, bad weights, ...).
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constructive procedure failed to certify its result (covering not
// reached, cubature weights infeasible, rank-deficient sampling set, ...).
struct certification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files or arguments.
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Points.

inline Vec3 normalized_point(double x, double y, double z) {
  Vec3 v(x, y, z);
  double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw precondition_error("sphere point must be a nonzero finite vector");
  return v / n;
}

// Geodesic distance on S^2; atan2 keeps full accuracy near 0 and pi.
inline double s2_distance(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Rotation written in Z(gamma) X(beta) Z(alpha) form, beta in [0, pi].
struct RotationPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  Mat3 matrix() const {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    Mat3 m;
    m << cg * ca - sg * cb * sa, -cg * sa - sg * cb * ca, sg * sb,
         sg * ca + cg * cb * sa, -sg * sa + cg * cb * ca, -cg * sb,
         sb * sa, sb * ca, cb;
    return m;
  }

  // Inverse of matrix(); the degenerate beta = 0, pi rays put all the
  // z-rotation into alpha resp. gamma. Round trips reproduce the matrix,
  // not necessarily the angles.
  static RotationPoint from_matrix(const Mat3& m) {
    RotationPoint g;
    const double sb = std::hypot(m(0, 2), m(1, 2));
    g.beta = std::atan2(sb, m(2, 2));
    if (sb > 1e-13) {
      g.alpha = std::atan2(m(2, 0), m(2, 1));
      g.gamma = std::atan2(m(0, 2), -m(1, 2));
    } else if (m(2, 2) > 0.0) {
      g.beta = 0.0;
      g.alpha = std::atan2(m(1, 0), m(0, 0));
      g.gamma = 0.0;
    } else {
      g.beta = pi;
      g.alpha = 0.0;
      g.gamma = std::atan2(m(0, 1), m(0, 0));
    }
    if (g.alpha < 0.0) g.alpha += 2.0 * pi;
    if (g.gamma < 0.0) g.gamma += 2.0 * pi;
    return g;
  }

  // Haar density against d(alpha) d(beta) d(gamma); integrates to one.
  double haar_density() const { return std::sin(beta) / (8.0 * pi * pi); }
};

// Angle of the relative rotation, i.e. the bi-invariant metric.
inline double so3_distance(const RotationPoint& g1, const RotationPoint& g2) {
  const double tr = (g1.matrix().transpose() * g2.matrix()).trace();
  double c = 0.5 * (tr - 1.0);
  c = std::min(1.0, std::max(-1.0, c));
  return std::acos(c);
}

struct ProductPoint {
  Vec3 a = Vec3::UnitZ();
  Vec3 b = Vec3::UnitZ();
};

inline double s2xs2_distance(const ProductPoint& p, const ProductPoint& q) {
  return std::hypot(s2_distance(p.a, q.a), s2_distance(p.b, q.b));
}

using Point = std::variant<Vec3, ProductPoint, RotationPoint>;

inline Manifold point_manifold(const Point& p) {
  if (std::holds_alternative<Vec3>(p)) return Manifold::S2;
  if (std::holds_alternative<ProductPoint>(p)) return Manifold::S2xS2;
  return Manifold::SO3;
}

inline double geodesic_distance(const Point& p, const Point& q) {
  if (p.index() != q.index())
    throw precondition_error("distance between points of different manifolds");
  if (const auto* a = std::get_if<Vec3>(&p))
    return s2_distance(*a, std::get<Vec3>(q));
  if (const auto* a = std::get_if<ProductPoint>(&p))
    return s2xs2_distance(*a, std::get<ProductPoint>(q));
  return so3_distance(std::get<RotationPoint>(p), std::get<RotationPoint>(q));
}

// Distance-ready flat copy of a point family. Rotations are cached as unit
// quaternions, turning the bi-invariant metric into 2 acos|q . q'| and
// sparing the Euler-angle trigonometry in nearest-neighbor loops.
class PointCloud {
 public:
  explicit PointCloud(Manifold m) : m_(m) {}
  PointCloud(Manifold m, const std::vector<Point>& pts) : m_(m) {
    data_.reserve(pts.size() * stride());
    for (const Point& p : pts) push(p);
  }

  Manifold manifold() const { return m_; }
  std::size_t size() const { return data_.size() / stride(); }

  void push(const Point& p) {
    if (point_manifold(p) != m_)
      throw precondition_error("PointCloud: point manifold mismatch");
    if (const auto* v = std::get_if<Vec3>(&p)) {
      data_.insert(data_.end(), {v->x(), v->y(), v->z()});
    } else if (const auto* pp = std::get_if<ProductPoint>(&p)) {
      data_.insert(data_.end(), {pp->a.x(), pp->a.y(), pp->a.z(),
                                 pp->b.x(), pp->b.y(), pp->b.z()});
    } else {
      const Eigen::Quaterniond q(std::get<RotationPoint>(p).matrix());
      data_.insert(data_.end(), {q.w(), q.x(), q.y(), q.z()});
    }
  }

  double distance(std::size_t i, const PointCloud& other, std::size_t j) const {
    const double* a = data_.data() + i * stride();
    const double* b = other.data_.data() + j * stride();
    switch (m_) {
      case Manifold::S2: return vec_angle(a, b);
      case Manifold::S2xS2: return std::hypot(vec_angle(a, b), vec_angle(a + 3, b + 3));
      case Manifold::SO3: {
        const double d =
            std::fabs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]);
        return 2.0 * std::acos(std::min(1.0, d));
      }
    }
    return 0.0;
  }
  double distance(std::size_t i, std::size_t j) const { return distance(i, *this, j); }

  std::size_t nearest(const PointCloud& other, std::size_t j,
                      double* dist_out = nullptr) const {
    std::size_t best = 0;
    double bd = distance(0, other, j);
    for (std::size_t i = 1; i < size(); ++i) {
      const double d = distance(i, other, j);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (dist_out) *dist_out = bd;
    return best;
  }

 private:
  std::size_t stride() const {
    return m_ == Manifold::S2 ? 3 : (m_ == Manifold::SO3 ? 4 : 6);
  }
  static double vec_angle(const double* a, const double* b) {
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz),
                      a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
  }

  Manifold m_;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. Distributions are hand-rolled on top of mt19937_64 so
// that identical seeds give identical streams on every platform.

struct Rng {
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(state_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, one value per call; the spare is cached.
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0, u2 = 0.0;
    do { u1 = uniform(); } while (u1 <= 1e-300);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  Vec3 sphere_point() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(s * std::cos(phi), s * std::sin(phi), z);
  }

  RotationPoint rotation_point() {
    RotationPoint g;
    g.alpha = uniform(0.0, 2.0 * pi);
    g.gamma = uniform(0.0, 2.0 * pi);
    g.beta = std::acos(uniform(-1.0, 1.0));
    return g;
  }

 private:
  std::mt19937_64 state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Pairwise (cascade) summation: deterministic and accurate for the long
// quadrature sums. Order is fixed by the input order.

inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

// ---------------------------------------------------------------------------
// Thread budget. Work items write disjoint output slots, so results do not
// depend on the thread count.

inline std::atomic<int>& thread_budget() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_thread_budget(int n) {
  thread_budget().store(n < 1 ? 1 : n);
}

template <class Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
  const int budget = thread_budget().load();
  if (budget <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(budget, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (4 * nt));
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t lo = next.fetch_add(chunk);
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace manirad
