#pragma once

// Text file formats. All five carry a one-line header naming the format,
// version, and the parameters needed to interpret the body; all numbers are
// printed with 17 significant digits so a write/read round trip is exact.
// Writers emit deterministic line orders, which makes byte-identical output
// the expected behavior for repeated runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "manirad/discretize.hpp"
#include "manirad/frames.hpp"
#include "manirad/geometry.hpp"
#include "manirad/spaces.hpp"
#include "manirad/splines.hpp"

namespace manirad {

// Malformed or inconsistent file content. Derives from precondition_error so
// callers that map exception kinds to exit codes treat it as caller error.
struct io_error : precondition_error {
  explicit io_error(const std::string& what) : precondition_error(what) {}
};

namespace ioutil {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string manifold_name(Manifold m) {
  switch (m) {
    case Manifold::S2: return "S2";
    case Manifold::S2xS2: return "S2xS2";
    case Manifold::SO3: return "SO3";
  }
  throw precondition_error("unknown manifold");
}

inline Manifold parse_manifold(const std::string& s) {
  if (s == "S2") return Manifold::S2;
  if (s == "S2xS2") return Manifold::S2xS2;
  if (s == "SO3") return Manifold::SO3;
  throw io_error("unknown manifold '" + s + "'");
}

// Header form: `<MAGIC> v1 key=value key=value ...`
struct Header {
  std::string magic;
  std::map<std::string, std::string> kv;

  const std::string& need(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw io_error(magic + ": missing header field " + key);
    return it->second;
  }
};

inline Header parse_header(const std::string& line, const std::string& magic) {
  std::istringstream in(line);
  Header h;
  std::string version;
  in >> h.magic >> version;
  if (h.magic != magic)
    throw io_error("expected " + magic + " file, found '" + h.magic + "'");
  if (version != "v1") throw io_error(magic + ": unsupported version " + version);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw io_error(magic + ": bad header token " + tok);
    h.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return h;
}

inline double parse_double(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw io_error(where + ": bad number '" + s + "'");
  }
  if (pos != s.size()) throw io_error(where + ": bad number '" + s + "'");
  return v;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  return in;
}

// non-empty, non-comment lines
inline std::vector<std::string> body_lines(std::ifstream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace ioutil

// --------------------------------------------------------------------------
// MRCOEF: harmonic coefficients

inline void write_coefficients(std::ostream& out, const HarmonicCoefficients& c) {
  using ioutil::fmt17;
  out << "MRCOEF v1 manifold=" << ioutil::manifold_name(c.manifold())
      << " omega=" << fmt17(c.omega()) << "\n";
  for (const auto& [key, blk] : c.blocks()) {
    for (int i = 1; i <= blk.rows(); ++i)
      for (int j = 1; j <= blk.cols(); ++j) {
        const double v = blk(i - 1, j - 1);
        if (v == 0.0) continue;
        if (c.manifold() == Manifold::S2)
          out << key.first << ' ' << i << ' ' << fmt17(v) << "\n";
        else if (c.manifold() == Manifold::SO3)
          out << key.first << ' ' << i << ' ' << j << ' ' << fmt17(v) << "\n";
        else
          out << key.first << ' ' << i << ' ' << key.second << ' ' << j << ' '
              << fmt17(v) << "\n";
      }
  }
}

inline void write_coefficients(const std::string& path,
                               const HarmonicCoefficients& c) {
  auto out = ioutil::open_out(path);
  write_coefficients(out, c);
}

inline HarmonicCoefficients read_coefficients(const std::string& path) {
  auto in = ioutil::open_in(path);
  std::string first;
  if (!std::getline(in, first)) throw io_error(path + ": empty file");
  const ioutil::Header h = ioutil::parse_header(first, "MRCOEF");
  const Manifold m = ioutil::parse_manifold(h.need("manifold"));
  const double omega = ioutil::parse_double(h.need("omega"), path);
  HarmonicCoefficients c(m, omega);
  std::set<std::tuple<int, int, int, int>> seen;
  for (const std::string& line : ioutil::body_lines(in)) {
    std::istringstream ls(line);
    int k1 = 0, i = 0, k2 = 0, j = 1;
    double v = 0.0;
    bool ok = false;
    if (m == Manifold::S2) {
      ok = static_cast<bool>(ls >> k1 >> i >> v);
      k2 = 0;
    } else if (m == Manifold::SO3) {
      ok = static_cast<bool>(ls >> k1 >> i >> j >> v);
      k2 = k1;
    } else {
      ok = static_cast<bool>(ls >> k1 >> i >> k2 >> j >> v);
    }
    std::string extra;
    if (!ok || (ls >> extra)) throw io_error(path + ": bad line '" + line + "'");
    if (!seen.insert({k1, i, k2, j}).second)
      throw io_error(path + ": duplicate index on line '" + line + "'");
    try {
      if (m == Manifold::S2)
        c.set(k1, i, v);
      else if (m == Manifold::SO3)
        c.set(k1, i, j, v);
      else
        c.set(k1, i, k2, j, v);
    } catch (const precondition_error& e) {
      throw io_error(path + ": line '" + line + "': " + e.what());
    }
  }
  return c;
}

// --------------------------------------------------------------------------
// MRLAT: point lattices

inline void write_lattice(std::ostream& out, const Lattice& L) {
  using ioutil::fmt17;
  out << "MRLAT v1 manifold=" << ioutil::manifold_name(L.manifold)
      << " rho=" << fmt17(L.rho) << " symmetric=" << (L.symmetric ? 1 : 0) << "\n";
  for (const Point& p : L.pts) {
    if (const auto* v = std::get_if<Vec3>(&p))
      out << fmt17(v->x()) << ' ' << fmt17(v->y()) << ' ' << fmt17(v->z()) << "\n";
    else if (const auto* q = std::get_if<ProductPoint>(&p))
      out << fmt17(q->a.x()) << ' ' << fmt17(q->a.y()) << ' ' << fmt17(q->a.z())
          << ' ' << fmt17(q->b.x()) << ' ' << fmt17(q->b.y()) << ' '
          << fmt17(q->b.z()) << "\n";
    else {
      const auto& g = std::get<RotationPoint>(p);
      out << fmt17(g.alpha) << ' ' << fmt17(g.beta) << ' ' << fmt17(g.gamma) << "\n";
    }
  }
}

inline void write_lattice(const std::string& path, const Lattice& L) {
  auto out = ioutil::open_out(path);
  write_lattice(out, L);
}

// Reads the point family and, by default, re-certifies separation and
// covering instead of trusting the file.
inline Lattice read_lattice(const std::string& path, bool verify = true) {
  auto in = ioutil::open_in(path);
  std::string first;
  if (!std::getline(in, first)) throw io_error(path + ": empty file");
  const ioutil::Header h = ioutil::parse_header(first, "MRLAT");
  Lattice L;
  L.manifold = ioutil::parse_manifold(h.need("manifold"));
  L.rho = ioutil::parse_double(h.need("rho"), path);
  L.symmetric = h.need("symmetric") == "1";
  for (const std::string& line : ioutil::body_lines(in)) {
    std::istringstream ls(line);
    bool ok = false;
    std::string extra;
    if (L.manifold == Manifold::S2) {
      Vec3 v;
      ok = static_cast<bool>(ls >> v.x() >> v.y() >> v.z());
      if (ok && std::fabs(v.norm() - 1.0) > 1e-9)
        throw io_error(path + ": point off the sphere on line '" + line + "'");
      if (ok) L.pts.emplace_back(Vec3(v.normalized()));
    } else if (L.manifold == Manifold::S2xS2) {
      ProductPoint q;
      ok = static_cast<bool>(ls >> q.a.x() >> q.a.y() >> q.a.z() >> q.b.x() >>
                             q.b.y() >> q.b.z());
      if (ok && (std::fabs(q.a.norm() - 1.0) > 1e-9 ||
                 std::fabs(q.b.norm() - 1.0) > 1e-9))
        throw io_error(path + ": point off the sphere on line '" + line + "'");
      if (ok) {
        q.a.normalize();
        q.b.normalize();
        L.pts.emplace_back(q);
      }
    } else {
      RotationPoint g;
      ok = static_cast<bool>(ls >> g.alpha >> g.beta >> g.gamma);
      if (ok) L.pts.emplace_back(g);
    }
    if (!ok || (ls >> extra)) throw io_error(path + ": bad line '" + line + "'");
  }
  if (L.pts.empty()) throw io_error(path + ": no points");
  if (verify && L.rho > 0.0) {
    const int density = std::min(64, std::max(1, static_cast<int>(4.0 / L.rho)));
    verify_lattice(L, density);
  }
  return L;
}

// --------------------------------------------------------------------------
// MRSPL: spline problems (functionals plus target values)

struct SplineProblem {
  FunctionalSet functionals;
  std::vector<double> values;
  double t = 0.0;
};

inline void write_spline_problem(std::ostream& out, const FunctionalSet& fs,
                                 const std::vector<double>& values, double t) {
  using ioutil::fmt17;
  if (values.size() != fs.items.size())
    throw precondition_error("write_spline_problem: value count mismatch");
  out << "MRSPL v1 manifold=" << ioutil::manifold_name(fs.manifold)
      << " t=" << fmt17(t) << "\n";
  for (std::size_t n = 0; n < fs.items.size(); ++n) {
    const Functional& f = fs.items[n];
    const std::string v = fmt17(values[n]);
    if (const auto* p = std::get_if<PointEvalF>(&f)) {
      if (fs.manifold == Manifold::SO3) {
        const auto& g = std::get<RotationPoint>(p->p);
        out << "point " << fmt17(g.alpha) << ' ' << fmt17(g.beta) << ' '
            << fmt17(g.gamma) << ' ' << v << "\n";
      } else {
        const Vec3& x = std::get<Vec3>(p->p);
        out << "point " << fmt17(x.x()) << ' ' << fmt17(x.y()) << ' '
            << fmt17(x.z()) << ' ' << v << "\n";
      }
    } else if (const auto* s = std::get_if<SymPointPairF>(&f)) {
      out << "sympair " << fmt17(s->x.x()) << ' ' << fmt17(s->x.y()) << ' '
          << fmt17(s->x.z()) << ' ' << v << "\n";
    } else if (const auto* ci = std::get_if<CircleIntegralF>(&f)) {
      out << "circle " << fmt17(ci->circle.pole.x()) << ' '
          << fmt17(ci->circle.pole.y()) << ' ' << fmt17(ci->circle.pole.z()) << ' '
          << v << "\n";
    } else if (const auto* he = std::get_if<HemisphereIntegralF>(&f)) {
      out << "hemi " << fmt17(he->pole.x()) << ' ' << fmt17(he->pole.y()) << ' '
          << fmt17(he->pole.z()) << ' ' << v << "\n";
    } else {
      const auto& sc = std::get<SO3CircleIntegralF>(f);
      out << "so3circ " << fmt17(sc.x.x()) << ' ' << fmt17(sc.x.y()) << ' '
          << fmt17(sc.x.z()) << ' ' << fmt17(sc.y.x()) << ' ' << fmt17(sc.y.y())
          << ' ' << fmt17(sc.y.z()) << ' ' << v << "\n";
    }
  }
}

inline void write_spline_problem(const std::string& path, const FunctionalSet& fs,
                                 const std::vector<double>& values, double t) {
  auto out = ioutil::open_out(path);
  write_spline_problem(out, fs, values, t);
}

inline SplineProblem read_spline_problem(const std::string& path) {
  auto in = ioutil::open_in(path);
  std::string first;
  if (!std::getline(in, first)) throw io_error(path + ": empty file");
  const ioutil::Header h = ioutil::parse_header(first, "MRSPL");
  SplineProblem sp;
  sp.functionals.manifold = ioutil::parse_manifold(h.need("manifold"));
  sp.t = ioutil::parse_double(h.need("t"), path);
  const Manifold m = sp.functionals.manifold;
  for (const std::string& line : ioutil::body_lines(in)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    const auto unit = [&](double x, double y, double z) {
      Vec3 v(x, y, z);
      if (std::fabs(v.norm() - 1.0) > 1e-9)
        throw io_error(path + ": direction off the sphere on line '" + line + "'");
      return Vec3(v.normalized());
    };
    bool ok = false;
    double v = 0.0;
    if (kind == "point") {
      double a, b, c;
      ok = static_cast<bool>(ls >> a >> b >> c >> v);
      if (ok) {
        if (m == Manifold::SO3)
          sp.functionals.items.push_back(PointEvalF{Point(RotationPoint{a, b, c})});
        else if (m == Manifold::S2)
          sp.functionals.items.push_back(PointEvalF{Point(unit(a, b, c))});
        else
          throw io_error(path + ": point functionals need S2 or SO3");
      }
    } else if (kind == "sympair" && m == Manifold::S2) {
      double a, b, c;
      ok = static_cast<bool>(ls >> a >> b >> c >> v);
      if (ok) sp.functionals.items.push_back(SymPointPairF{unit(a, b, c)});
    } else if (kind == "circle" && m == Manifold::S2) {
      double a, b, c;
      ok = static_cast<bool>(ls >> a >> b >> c >> v);
      if (ok)
        sp.functionals.items.push_back(CircleIntegralF{great_circle(unit(a, b, c))});
    } else if (kind == "hemi" && m == Manifold::S2) {
      double a, b, c;
      ok = static_cast<bool>(ls >> a >> b >> c >> v);
      if (ok) sp.functionals.items.push_back(HemisphereIntegralF{unit(a, b, c)});
    } else if (kind == "so3circ" && m == Manifold::SO3) {
      double a, b, c, d, e, f;
      ok = static_cast<bool>(ls >> a >> b >> c >> d >> e >> f >> v);
      if (ok)
        sp.functionals.items.push_back(
            SO3CircleIntegralF{unit(a, b, c), unit(d, e, f)});
    } else {
      throw io_error(path + ": functional '" + kind + "' not valid on " +
                     ioutil::manifold_name(m));
    }
    std::string extra;
    if (!ok || (ls >> extra)) throw io_error(path + ": bad line '" + line + "'");
    sp.values.push_back(v);
  }
  if (sp.functionals.items.empty()) throw io_error(path + ": no functionals");
  validate_functional_set(sp.functionals);
  return sp;
}

// --------------------------------------------------------------------------
// MRCUB: cubature (lattice coordinates plus weight per line)

inline void write_cubature(std::ostream& out, const Cubature& C) {
  using ioutil::fmt17;
  out << "MRCUB v1 manifold=" << ioutil::manifold_name(C.lattice.manifold)
      << " omega=" << fmt17(C.omega_exact) << "\n";
  for (std::size_t n = 0; n < C.size(); ++n) {
    const Point& p = C.lattice.pts[n];
    if (const auto* v = std::get_if<Vec3>(&p))
      out << fmt17(v->x()) << ' ' << fmt17(v->y()) << ' ' << fmt17(v->z());
    else if (const auto* q = std::get_if<ProductPoint>(&p))
      out << fmt17(q->a.x()) << ' ' << fmt17(q->a.y()) << ' ' << fmt17(q->a.z())
          << ' ' << fmt17(q->b.x()) << ' ' << fmt17(q->b.y()) << ' '
          << fmt17(q->b.z());
    else {
      const auto& g = std::get<RotationPoint>(p);
      out << fmt17(g.alpha) << ' ' << fmt17(g.beta) << ' ' << fmt17(g.gamma);
    }
    out << ' ' << fmt17(C.weights[n]) << "\n";
  }
}

inline void write_cubature(const std::string& path, const Cubature& C) {
  auto out = ioutil::open_out(path);
  write_cubature(out, C);
}

// The file asserts its exactness certificate; verify=true recomputes the
// moment residual against it (costly for big rules) instead of trusting it.
inline Cubature read_cubature(const std::string& path, bool verify = false) {
  auto in = ioutil::open_in(path);
  std::string first;
  if (!std::getline(in, first)) throw io_error(path + ": empty file");
  const ioutil::Header h = ioutil::parse_header(first, "MRCUB");
  Cubature C;
  C.lattice.manifold = ioutil::parse_manifold(h.need("manifold"));
  C.omega_exact = ioutil::parse_double(h.need("omega"), path);
  std::vector<double> w;
  for (const std::string& line : ioutil::body_lines(in)) {
    std::istringstream ls(line);
    bool ok = false;
    double wt = 0.0;
    std::string extra;
    if (C.lattice.manifold == Manifold::S2) {
      Vec3 v;
      ok = static_cast<bool>(ls >> v.x() >> v.y() >> v.z() >> wt);
      if (ok && std::fabs(v.norm() - 1.0) > 1e-9)
        throw io_error(path + ": point off the sphere on line '" + line + "'");
      if (ok) C.lattice.pts.emplace_back(Vec3(v.normalized()));
    } else if (C.lattice.manifold == Manifold::S2xS2) {
      ProductPoint q;
      ok = static_cast<bool>(ls >> q.a.x() >> q.a.y() >> q.a.z() >> q.b.x() >>
                             q.b.y() >> q.b.z() >> wt);
      if (ok) {
        q.a.normalize();
        q.b.normalize();
        C.lattice.pts.emplace_back(q);
      }
    } else {
      RotationPoint g;
      ok = static_cast<bool>(ls >> g.alpha >> g.beta >> g.gamma >> wt);
      if (ok) C.lattice.pts.emplace_back(g);
    }
    if (!ok || (ls >> extra)) throw io_error(path + ": bad line '" + line + "'");
    if (!(wt > 0.0))
      throw io_error(path + ": weight must be positive on line '" + line + "'");
    w.push_back(wt);
  }
  if (w.empty()) throw io_error(path + ": no nodes");
  C.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
  if (verify) {
    BasisSlot worst;
    C.residual = cubature_moment_residual(C.lattice, C.weights, C.omega_exact, &worst);
    if (C.residual > 1e-10)
      throw certification_error(
          path + ": stored certificate omega=" + ioutil::fmt17(C.omega_exact) +
          " fails verification, residual " + std::to_string(C.residual) +
          " at slot " + detail::slot_name(worst, C.lattice.manifold));
  }
  return C;
}

// --------------------------------------------------------------------------
// MRFRM: frame manifest referencing per-level lattice and cubature files

inline void write_frame(const std::string& manifest_path, const FrameSystem& fs) {
  namespace fs_sys = std::filesystem;
  const fs_sys::path mp(manifest_path);
  const std::string stem = mp.stem().string();
  auto out = ioutil::open_out(manifest_path);
  out << "MRFRM v1 manifold=S2 Jmax=" << fs.bank.jmax << "\n";
  for (const FrameLevel& lv : fs.levels) {
    const std::string lat = stem + "-level" + std::to_string(lv.j) + ".mrlat";
    const std::string cub = stem + "-level" + std::to_string(lv.j) + ".mrcub";
    write_lattice((mp.parent_path() / lat).string(), lv.lattice);
    Cubature c;
    c.lattice = lv.lattice;
    c.weights = lv.b;
    c.omega_exact = product_bandwidth(Manifold::S2, lv.band_hi, lv.band_hi);
    c.residual = lv.cubature_residual;
    write_cubature((mp.parent_path() / cub).string(), c);
    out << "level " << lv.j << " lattice=" << lat << " cubature=" << cub << "\n";
  }
}

inline FrameSystem read_frame(const std::string& manifest_path, bool verify = false) {
  namespace fs_sys = std::filesystem;
  const fs_sys::path mp(manifest_path);
  auto in = ioutil::open_in(manifest_path);
  std::string first;
  if (!std::getline(in, first)) throw io_error(manifest_path + ": empty file");
  const ioutil::Header h = ioutil::parse_header(first, "MRFRM");
  if (ioutil::parse_manifold(h.need("manifold")) != Manifold::S2)
    throw io_error(manifest_path + ": frames are defined on S2");
  const int jmax = static_cast<int>(ioutil::parse_double(h.need("Jmax"), manifest_path));

  FrameSystem out;
  out.bank = build_filter_bank(jmax);
  out.coverage = out.bank.coverage();
  for (const std::string& line : ioutil::body_lines(in)) {
    std::istringstream ls(line);
    std::string kw, latf, cubf;
    int j = -1;
    if (!(ls >> kw >> j >> latf >> cubf) || kw != "level" ||
        latf.rfind("lattice=", 0) != 0 || cubf.rfind("cubature=", 0) != 0)
      throw io_error(manifest_path + ": bad line '" + line + "'");
    if (j != static_cast<int>(out.levels.size()))
      throw io_error(manifest_path + ": levels must appear in order from 0");
    FrameLevel lv;
    lv.j = j;
    lv.band_lo = out.bank.band_lo(j);
    lv.band_hi = out.bank.band_hi(j);
    lv.kmax = max_degree_for(lv.band_hi);
    lv.phi.resize(lv.kmax + 1);
    for (int k = 0; k <= lv.kmax; ++k) lv.phi[k] = out.bank.phi(j, degree_lambda(k));
    lv.lattice =
        read_lattice((mp.parent_path() / latf.substr(8)).string(), verify);
    const Cubature c =
        read_cubature((mp.parent_path() / cubf.substr(9)).string(), verify);
    if (c.size() != lv.lattice.size())
      throw io_error(manifest_path + ": level " + std::to_string(j) +
                     " lattice and cubature sizes differ");
    const double need = product_bandwidth(Manifold::S2, lv.band_hi, lv.band_hi);
    if (c.omega_exact + bandwidth_slack < need)
      throw certification_error(manifest_path + ": level " + std::to_string(j) +
                                " cubature certificate " +
                                ioutil::fmt17(c.omega_exact) +
                                " below the required " + ioutil::fmt17(need));
    lv.b = c.weights;
    lv.cubature_residual = c.residual;
    out.levels.push_back(std::move(lv));
  }
  if (out.levels.size() != static_cast<std::size_t>(jmax) + 1)
    throw io_error(manifest_path + ": expected " + std::to_string(jmax + 1) +
                   " levels, found " + std::to_string(out.levels.size()));
  return out;
}

// --------------------------------------------------------------------------
// Run manifest: every CLI command records its effective parameters

inline void write_run_manifest(
    const std::string& path, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& params) {
  auto out = ioutil::open_out(path);
  out << "MRRUN v1\n";
  out << "version " << version_string << "\n";
  out << "command " << command << "\n";
  for (const auto& [k, v] : params) out << k << ' ' << v << "\n";
}

}  // namespace manirad
