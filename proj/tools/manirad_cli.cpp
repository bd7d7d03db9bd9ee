// Command-line driver. Every command resolves its parameters (flags beat the
// config file, which beats defaults), writes a run manifest with the effective
// values, and emits deterministic 17-digit text outputs, so identical
// manifests imply byte-identical files.
//
// Exit codes: 0 success, 2 certification failure, 3 precondition violation
// (including malformed inputs), 64 usage.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "manirad/io.hpp"
#include "manirad/selftest.hpp"

namespace {

using namespace manirad;

int g_exit = 0;  // set by callbacks that finish but report failure

std::string join(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::vector<double> read_values_file(const std::string& path) {
  auto in = ioutil::open_in(path);
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw io_error(path + ": non-numeric content");
  if (v.empty()) throw io_error(path + ": no values");
  return v;
}

void write_tsv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = ioutil::open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? '\t' : '\n');
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << ioutil::fmt17(row[i]) << (i + 1 < row.size() ? '\t' : '\n');
}

// Zeroes every block outside the image subspace of the transform and returns
// the norm of what was removed. Inverse transforms reject off-image content
// outright; measured or iterated data always carries a little, and discarding
// it is the least-squares answer.
double project_to_image(const std::string& transform, HarmonicCoefficients& g) {
  double removed_sq = 0.0;
  std::vector<std::pair<int, int>> drop;
  for (const auto& [key, blk] : g.blocks()) {
    bool off = false;
    if (transform == "funk") off = key.first % 2 == 1;
    else if (transform == "hemi") off = key.first == 0 || (key.first % 2 == 0);
    else off = key.first != key.second;
    if (off) {
      removed_sq += blk.squaredNorm();
      drop.push_back(key);
    }
  }
  for (const auto& [k1, k2] : drop) g.block(k1, k2).setZero();
  g.prune(0.0);
  return std::sqrt(removed_sq);
}

HarmonicCoefficients spectral_inverse(const std::string& transform,
                                      const HarmonicCoefficients& g) {
  if (transform == "funk") return funk_radon_inverse(g);
  if (transform == "hemi") return hemispherical_inverse(g);
  return so3_radon_inverse(g);
}

// Sample locations for transform inversion come in as a spline problem whose
// functionals must all be point evaluations.
std::vector<Point> sample_points(const FunctionalSet& fs) {
  std::vector<Point> pts;
  pts.reserve(fs.items.size());
  for (const Functional& f : fs.items) {
    const auto* pe = std::get_if<PointEvalF>(&f);
    if (!pe)
      throw precondition_error(
          "invert: the problem file must contain point samples only");
    pts.push_back(pe->p);
  }
  return pts;
}

struct CommonOpts {
  std::string out_dir = ".";
  int threads = 0;
};

void apply_threads(const CommonOpts& c) {
  int n = c.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("MR_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end && *end == '\0' && v > 0) n = static_cast<int>(v);
    }
  }
  if (n > 0) set_thread_budget(n);
}

// ---------------------------------------------------------------------------
// lattice

struct LatticeOpts {
  std::string manifold = "S2";
  double rho = 0.0;
  bool symmetric = false;
  std::uint64_t seed = 1;
  std::string out;
};

void run_lattice(const CommonOpts& common, const LatticeOpts& o) {
  const std::string out = o.out.empty() ? join(common.out_dir, "lattice.mrlat") : o.out;
  write_run_manifest(join(common.out_dir, "lattice.mrrun"), "lattice",
                     {{"manifold", o.manifold},
                      {"rho", ioutil::fmt17(o.rho)},
                      {"symmetric", o.symmetric ? "1" : "0"},
                      {"seed", std::to_string(o.seed)},
                      {"out", out}});

  Lattice L = generate_lattice(ioutil::parse_manifold(o.manifold), o.rho,
                               o.symmetric, o.seed);
  const int density = std::min(64, std::max(1, static_cast<int>(4.0 / o.rho)));
  const LatticeCertificate cert = verify_lattice(L, density);
  write_lattice(out, L);

  // separation is exact; covering is measured on a finite probe grid, so the
  // budget carries one grid spacing of slack
  const double sep_need = o.rho / 2.0;
  const double cov_budget = o.rho / 2.0 + cert.probe_spacing;
  std::cout << "lattice: " << o.manifold << ", rho " << o.rho << ", "
            << (o.symmetric ? "symmetric, " : "") << L.size() << " points -> " << out
            << "\n";
  std::cout << "certificate: separation " << cert.separation << " (need >= "
            << sep_need << "), covering " << cert.covering
            << " (grid-certified budget " << cov_budget << ", probe spacing "
            << cert.probe_spacing << ")\n";
  if (cert.separation + 1e-12 < sep_need || cert.covering > cov_budget + 1e-12)
    throw certification_error("lattice: separation/covering certificate failed");
  std::cout << "certified\n";
}

// ---------------------------------------------------------------------------
// cubature

struct CubatureOpts {
  std::string lattice;
  std::string manifold = "S2";
  double rho = 0.0;
  bool symmetric = false;
  std::uint64_t seed = 1;
  double omega = 0.0;
  std::string out;
};

void run_cubature(const CommonOpts& common, const CubatureOpts& o) {
  const std::string out = o.out.empty() ? join(common.out_dir, "cubature.mrcub") : o.out;
  write_run_manifest(join(common.out_dir, "cubature.mrrun"), "cubature",
                     {{"lattice", o.lattice.empty() ? "(generated)" : o.lattice},
                      {"manifold", o.manifold},
                      {"rho", ioutil::fmt17(o.rho)},
                      {"symmetric", o.symmetric ? "1" : "0"},
                      {"seed", std::to_string(o.seed)},
                      {"omega", ioutil::fmt17(o.omega)},
                      {"out", out}});

  const Lattice L = !o.lattice.empty()
                        ? read_lattice(o.lattice)
                        : generate_lattice(ioutil::parse_manifold(o.manifold), o.rho,
                                           o.symmetric, o.seed);
  const Cubature C = compute_cubature(L, o.omega);
  write_cubature(out, C);
  std::cout << "cubature: " << C.size() << " nodes, exact to omega " << C.omega_exact
            << ", moment residual " << C.residual << " -> " << out << "\n";
  std::cout << "weights in [" << C.weights.minCoeff() << ", " << C.weights.maxCoeff()
            << "], mass defect " << std::fabs(C.weights.sum() - 1.0) << "\n";
}

// ---------------------------------------------------------------------------
// radon

struct RadonOpts {
  std::string transform;
  std::string direction = "forward";
  std::string in;
  std::string out;
};

void run_radon(const CommonOpts& common, const RadonOpts& o) {
  const std::string out = o.out.empty() ? join(common.out_dir, "radon.mrcoef") : o.out;
  write_run_manifest(join(common.out_dir, "radon.mrrun"), "radon",
                     {{"transform", o.transform},
                      {"direction", o.direction},
                      {"in", o.in},
                      {"out", out}});

  const HarmonicCoefficients c = read_coefficients(o.in);
  HarmonicCoefficients r(c.manifold(), c.omega());
  if (o.direction == "forward") {
    if (o.transform == "funk") r = funk_radon_forward(c);
    else if (o.transform == "hemi") r = hemispherical_forward(c);
    else r = so3_radon_forward(c);
  } else {
    r = spectral_inverse(o.transform, c);
  }
  write_coefficients(out, r);
  std::cout << "radon " << o.direction << " " << o.transform << ": omega " << c.omega()
            << " -> " << r.omega() << ", norm " << c.norm() << " -> " << r.norm()
            << " -> " << out << "\n";
}

// ---------------------------------------------------------------------------
// spline

struct SplineOpts {
  std::string problem;
  double t = std::numeric_limits<double>::quiet_NaN();
  std::string out;
};

void run_spline(const CommonOpts& common, const SplineOpts& o) {
  const std::string out = o.out.empty() ? join(common.out_dir, "spline.mrcoef") : o.out;
  const SplineProblem prob = read_spline_problem(o.problem);
  const double t = std::isnan(o.t) ? prob.t : o.t;
  write_run_manifest(join(common.out_dir, "spline.mrrun"), "spline",
                     {{"problem", o.problem}, {"t", ioutil::fmt17(t)}, {"out", out}});

  Eigen::VectorXd v(static_cast<Eigen::Index>(prob.values.size()));
  for (std::size_t i = 0; i < prob.values.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = prob.values[i];
  const Spline s = solve_spline(prob.functionals, v, t);
  write_coefficients(out, s.coefficients);

  double resid = 0.0;
  for (std::size_t i = 0; i < prob.functionals.size(); ++i)
    resid = std::max(resid, std::fabs(functional_apply(prob.functionals.items[i],
                                                       s.coefficients) -
                                      prob.values[i]));
  std::cout << "spline: " << prob.functionals.size() << " functionals, t " << t
            << ", kmax " << s.kmax << ", "
            << (s.path == Spline::SolvePath::cholesky ? "cholesky" : "whitened qr")
            << " -> " << out << "\n";
  std::cout << "max residual " << resid << ", norm " << sobolev_norm(s.coefficients, t)
            << "\n";
}

// ---------------------------------------------------------------------------
// invert

struct InvertOpts {
  std::string transform;
  std::string method;
  std::string problem;   // spline / iterative / frame sample locations + values
  std::string cubature;  // discrete
  std::string lattice;   // iterative / frame
  std::string in;        // image coefficients, sampled synthetically
  std::string values;    // raw samples, one per line
  std::string truth;
  double omega = 0.0;
  double t = 1.5;
  std::vector<int> levels = {0, 1, 2};
  double tol = 1e-10;
  int max_steps = 50;
  double gamma = 0.0;
  std::string out;
};

std::vector<double> synthetic_or_file_samples(const InvertOpts& o,
                                              const std::vector<Point>& pts) {
  if (!o.in.empty()) {
    const HarmonicCoefficients g = read_coefficients(o.in);
    std::vector<double> s(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) s[i] = synthesize_at(g, pts[i]);
    return s;
  }
  std::vector<double> s = read_values_file(o.values);
  if (s.size() != pts.size())
    throw precondition_error("invert: " + std::to_string(s.size()) +
                             " values against " + std::to_string(pts.size()) +
                             " sample points");
  return s;
}

void report_recovery(const std::string& out, const HarmonicCoefficients& rec,
                     const std::string& truth) {
  write_coefficients(out, rec);
  std::cout << "recovered omega " << rec.omega() << ", norm " << rec.norm() << " -> "
            << out << "\n";
  if (!truth.empty()) {
    const HarmonicCoefficients f = read_coefficients(truth);
    std::cout << "error vs truth "
              << linear_combination(1.0, rec, -1.0, f).norm() / f.norm() << "\n";
  }
}

void run_invert(const CommonOpts& common, const InvertOpts& o) {
  const std::string out = o.out.empty() ? join(common.out_dir, "invert.mrcoef") : o.out;
  std::string levels_str;
  for (std::size_t i = 0; i < o.levels.size(); ++i)
    levels_str += (i ? "," : "") + std::to_string(o.levels[i]);
  write_run_manifest(join(common.out_dir, "invert.mrrun"), "invert",
                     {{"transform", o.transform},
                      {"method", o.method},
                      {"problem", o.problem},
                      {"cubature", o.cubature},
                      {"lattice", o.lattice},
                      {"in", o.in},
                      {"values", o.values},
                      {"omega", ioutil::fmt17(o.omega)},
                      {"t", ioutil::fmt17(o.t)},
                      {"levels", levels_str},
                      {"tol", ioutil::fmt17(o.tol)},
                      {"max_steps", std::to_string(o.max_steps)},
                      {"gamma", ioutil::fmt17(o.gamma)},
                      {"out", out}});

  if (o.method == "spline") {
    if (o.transform == "hemi")
      throw precondition_error("invert: spline inversion covers funk and so3");
    const SplineProblem prob = read_spline_problem(o.problem);
    const std::vector<Point> pts = sample_points(prob.functionals);
    const std::vector<double>& vals = prob.values;

    HarmonicCoefficients truth(prob.functionals.manifold, 0.0);
    const bool have_truth = !o.truth.empty();
    if (have_truth) truth = read_coefficients(o.truth);

    std::vector<std::string> header = {"level", "tau", "sample_residual"};
    if (have_truth) header.push_back("error");
    std::vector<std::vector<double>> rows;
    for (const int l : o.levels) {
      HarmonicCoefficients rec(Manifold::S2, 0.0);
      double tau = 0.0;
      if (o.transform == "funk") {
        std::vector<Vec3> xs;
        for (const Point& p : pts) xs.push_back(std::get<Vec3>(p));
        rec = spline_inversion_funk_radon(xs, vals, o.t, l);
        tau = std::pow(2.0, l + 1) + o.t + 0.5;
      } else {
        std::vector<ProductPoint> xs;
        for (const Point& p : pts) xs.push_back(std::get<ProductPoint>(p));
        rec = spline_inversion_so3(xs, vals, o.t, l);
        tau = std::pow(2.0, l + 2) + o.t + 1.0;
      }
      const HarmonicCoefficients img = o.transform == "funk"
                                           ? funk_radon_forward(rec)
                                           : so3_radon_forward(rec);
      double resid = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        resid = std::max(resid, std::fabs(synthesize_at(img, pts[i]) - vals[i]));
      std::vector<double> row = {static_cast<double>(l), tau, resid};
      if (have_truth)
        row.push_back(linear_combination(1.0, rec, -1.0, truth).norm() / truth.norm());
      rows.push_back(row);
      const std::string stem = out.size() > 7 && out.ends_with(".mrcoef")
                                   ? out.substr(0, out.size() - 7)
                                   : out;
      write_coefficients(stem + "-level" + std::to_string(l) + ".mrcoef", rec);
    }
    const std::string table = join(common.out_dir, "invert-table.tsv");
    write_tsv(table, header, rows);
    std::cout << "spline inversion of " << o.transform << " at levels " << levels_str
              << " -> " << table << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      std::cout << "  level " << o.levels[i] << ": sample residual " << rows[i][2]
                << (have_truth ? ", error " + ioutil::fmt17(rows[i][3]) : "") << "\n";
    return;
  }

  if (o.method == "discrete") {
    const Cubature C = read_cubature(o.cubature);
    const std::vector<double> samples = synthetic_or_file_samples(o, C.lattice.pts);
    HarmonicCoefficients rec(Manifold::S2, 0.0);
    if (o.transform == "funk") {
      rec = discrete_invert_funk_radon(samples, C, o.omega);
    } else if (o.transform == "so3") {
      rec = discrete_invert_so3(samples, C, o.omega);
    } else {
      HarmonicCoefficients g = discrete_fourier(samples, C, o.omega);
      const double removed = project_to_image("hemi", g);
      std::cout << "off-image content removed: " << removed << "\n";
      rec = hemispherical_inverse(g);
    }
    report_recovery(out, rec, o.truth);
    return;
  }

  // iterative / frame: reconstruct the transform image on its own manifold
  // from lattice samples, then invert spectrally
  const Lattice L = read_lattice(o.lattice);
  const std::vector<double> samples = synthetic_or_file_samples(o, L.pts);
  const double omega_img = o.transform == "so3" ? 2.0 * o.omega : o.omega;
  HarmonicCoefficients g(L.manifold, omega_img);
  IterationTrace tr;
  if (o.method == "iterative") {
    std::tie(g, tr) = iterative_reconstruct(samples, L, omega_img, o.tol, o.max_steps);
  } else {
    const std::optional<double> gamma =
        o.gamma > 0.0 ? std::optional<double>(o.gamma) : std::nullopt;
    std::tie(g, tr) = frame_algorithm(samples, L, omega_img, gamma, o.tol, o.max_steps);
  }
  std::cout << o.method << " image reconstruction: " << tr.steps << " steps, "
            << (tr.converged ? "converged" : "NOT converged") << ", contraction "
            << tr.contraction << "\n";
  const double removed = project_to_image(o.transform, g);
  std::cout << "off-image content removed: " << removed << "\n";
  report_recovery(out, spectral_inverse(o.transform, g), o.truth);
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructOpts {
  std::string method = "iterative";
  std::string lattice;
  std::string in;
  std::string values;
  double omega = 0.0;
  double tol = 1e-10;
  int max_steps = 50;
  double gamma = 0.0;
  std::string out;
  std::string trace;
};

void run_reconstruct(const CommonOpts& common, const ReconstructOpts& o) {
  const std::string out =
      o.out.empty() ? join(common.out_dir, "reconstruct.mrcoef") : o.out;
  const std::string trace_out =
      o.trace.empty() ? join(common.out_dir, "reconstruct-trace.tsv") : o.trace;
  write_run_manifest(join(common.out_dir, "reconstruct.mrrun"), "reconstruct",
                     {{"method", o.method},
                      {"lattice", o.lattice},
                      {"in", o.in},
                      {"values", o.values},
                      {"omega", ioutil::fmt17(o.omega)},
                      {"tol", ioutil::fmt17(o.tol)},
                      {"max_steps", std::to_string(o.max_steps)},
                      {"gamma", ioutil::fmt17(o.gamma)},
                      {"out", out},
                      {"trace", trace_out}});

  const Lattice L = read_lattice(o.lattice);
  HarmonicCoefficients ref(L.manifold, o.omega);
  const bool have_ref = !o.in.empty();
  std::vector<double> samples;
  if (have_ref) {
    ref = read_coefficients(o.in);
    samples.resize(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) samples[i] = synthesize_at(ref, L.pts[i]);
  } else {
    samples = read_values_file(o.values);
    if (samples.size() != L.size())
      throw precondition_error("reconstruct: " + std::to_string(samples.size()) +
                               " values against " + std::to_string(L.size()) +
                               " lattice points");
  }

  if (o.method == "voronoi") {
    const HarmonicCoefficients rec = voronoi_approximation(samples, L, o.omega);
    write_coefficients(out, rec);
    std::cout << "voronoi approximation -> " << out << "\n";
    if (have_ref)
      std::cout << "error vs input "
                << linear_combination(1.0, rec, -1.0, ref).norm() / ref.norm() << "\n";
    return;
  }

  HarmonicCoefficients rec(L.manifold, o.omega);
  IterationTrace tr;
  if (o.method == "iterative") {
    std::tie(rec, tr) = iterative_reconstruct(samples, L, o.omega, o.tol, o.max_steps,
                                              have_ref ? &ref : nullptr);
  } else {
    const auto [A, B] = pp_frame_bounds(L, o.omega);
    const std::optional<double> gamma =
        o.gamma > 0.0 ? std::optional<double>(o.gamma) : std::nullopt;
    std::cout << "frame bounds A " << A << ", B " << B << ", eta "
              << (B - A) / (A + B) << ", gamma " << gamma.value_or(2.0 / (A + B))
              << "\n";
    std::tie(rec, tr) = frame_algorithm(samples, L, o.omega, gamma, o.tol, o.max_steps,
                                        have_ref ? &ref : nullptr);
  }
  write_coefficients(out, rec);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tr.errors.size(); ++i)
    rows.push_back({static_cast<double>(i), tr.errors[i]});
  write_tsv(trace_out, {"step", have_ref ? "error" : "update_norm"}, rows);

  std::cout << o.method << ": " << tr.steps << " steps, "
            << (tr.converged ? "converged" : "NOT converged") << ", contraction "
            << tr.contraction;
  if (tr.bound > 0.0) std::cout << " (bound " << tr.bound << ")";
  std::cout << " -> " << out << "\n";
  std::cout << "trace -> " << trace_out << "\n";
  if (have_ref && !tr.errors.empty())
    std::cout << "final error " << tr.errors.back() << "\n";
}

// ---------------------------------------------------------------------------
// frame

struct FrameOpts {
  int jmax = 2;
  double lattice_constant = 0.45;
  std::uint64_t seed = 1;
  int check_functions = 20;
  std::string frame;
  std::string in;
  std::string coeffs;
  int level = 0;
  std::size_t atom = 0;
  int steps = 160;
  std::string out;
};

void run_frame_build(const CommonOpts& common, const FrameOpts& o) {
  const std::string stem = o.out.empty() ? join(common.out_dir, "frame") : o.out;
  write_run_manifest(join(common.out_dir, "frame-build.mrrun"), "frame build",
                     {{"jmax", std::to_string(o.jmax)},
                      {"lattice_constant", ioutil::fmt17(o.lattice_constant)},
                      {"seed", std::to_string(o.seed)},
                      {"check_functions", std::to_string(o.check_functions)},
                      {"out", stem}});

  const FrameSystem fs = build_frame(o.jmax, o.lattice_constant, o.seed);
  write_frame(stem + ".mrfrm", fs);

  std::cout << "frame: jmax " << o.jmax << ", coverage omega " << fs.coverage << ", "
            << fs.atom_count() << " atoms -> " << stem << ".mrfrm\n";
  for (const FrameLevel& lv : fs.levels)
    std::cout << "  level " << lv.j << ": band [" << lv.band_lo << ", " << lv.band_hi
              << "], kmax " << lv.kmax << ", " << lv.lattice.size()
              << " atoms, cubature residual " << lv.cubature_residual << "\n";

  const double pou = fs.bank.partition_residual();
  Rng rng(9);
  double defect = 0.0;
  for (int i = 0; i < o.check_functions; ++i) {
    const HarmonicCoefficients f = random_coefficients(Manifold::S2, fs.coverage, rng);
    const FrameCoefficients fc = frame_analyze(f, fs);
    defect = std::max(defect,
                      std::fabs(fc.squared_sum() - f.squared_norm()) / f.squared_norm());
  }
  std::cout << "partition residual " << pou << ", parseval defect " << defect << " ("
            << o.check_functions << " functions)\n";
  if (!(defect < 1e-9))
    throw certification_error("frame build: parseval defect " +
                              std::to_string(defect) + " not below 1e-9");
}

void run_frame_analyze(const CommonOpts& common, const FrameOpts& o) {
  const std::string out =
      o.out.empty() ? join(common.out_dir, "frame-coeffs.tsv") : o.out;
  write_run_manifest(join(common.out_dir, "frame-analyze.mrrun"), "frame analyze",
                     {{"frame", o.frame}, {"in", o.in}, {"out", out}});

  const FrameSystem fs = read_frame(o.frame);
  const HarmonicCoefficients f = read_coefficients(o.in);
  const FrameCoefficients fc = frame_analyze(f, fs);

  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < fc.level.size(); ++j)
    for (Eigen::Index k = 0; k < fc.level[j].size(); ++k)
      rows.push_back({static_cast<double>(j), static_cast<double>(k), fc.level[j][k]});
  write_tsv(out, {"level", "atom", "value"}, rows);

  const double defect =
      std::fabs(fc.squared_sum() - f.squared_norm()) / f.squared_norm();
  std::cout << "analyzed " << rows.size() << " coefficients -> " << out << "\n";
  std::cout << "energy defect " << defect << "\n";
}

void run_frame_synthesize(const CommonOpts& common, const FrameOpts& o) {
  const std::string out =
      o.out.empty() ? join(common.out_dir, "frame-synth.mrcoef") : o.out;
  write_run_manifest(join(common.out_dir, "frame-synthesize.mrrun"), "frame synthesize",
                     {{"frame", o.frame}, {"coeffs", o.coeffs}, {"out", out}});

  const FrameSystem fs = read_frame(o.frame);
  FrameCoefficients fc;
  fc.level.resize(fs.levels.size());
  for (std::size_t j = 0; j < fs.levels.size(); ++j)
    fc.level[j] =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fs.levels[j].lattice.size()));

  auto in = ioutil::open_in(o.coeffs);
  std::string line;
  if (!std::getline(in, line)) throw io_error(o.coeffs + ": empty file");
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t j = 0, k = 0;
    double v = 0.0;
    if (!(ls >> j >> k >> v)) throw io_error(o.coeffs + ": bad line '" + line + "'");
    if (j >= fc.level.size() ||
        k >= static_cast<std::size_t>(fc.level[j].size()))
      throw io_error(o.coeffs + ": atom (" + std::to_string(j) + ", " +
                     std::to_string(k) + ") outside the frame");
    fc.level[j][static_cast<Eigen::Index>(k)] = v;
    ++n;
  }
  const HarmonicCoefficients g = frame_synthesize(fc, fs);
  write_coefficients(out, g);
  std::cout << "synthesized from " << n << " coefficients, omega " << g.omega()
            << ", norm " << g.norm() << " -> " << out << "\n";
}

void run_frame_localize(const CommonOpts& common, const FrameOpts& o) {
  const std::string out =
      o.out.empty() ? join(common.out_dir, "frame-localization.tsv") : o.out;
  write_run_manifest(join(common.out_dir, "frame-localize.mrrun"), "frame localize",
                     {{"frame", o.frame},
                      {"level", std::to_string(o.level)},
                      {"atom", std::to_string(o.atom)},
                      {"steps", std::to_string(o.steps)},
                      {"out", out}});

  const FrameSystem fs = read_frame(o.frame);
  if (o.level < 0 || o.level >= static_cast<int>(fs.levels.size()))
    throw precondition_error("frame localize: level outside the frame");
  const FrameLevel& lv = fs.levels[o.level];
  if (o.atom >= lv.lattice.size())
    throw precondition_error("frame localize: atom index outside the level");

  const Vec3 x0 = std::get<Vec3>(lv.lattice.pts[o.atom]);
  Vec3 e = std::fabs(x0.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = x0.cross(e).normalized();
  const Vec3 e2 = x0.cross(e1).normalized();

  const int rays = 8;
  std::vector<std::vector<double>> rows;
  rows.push_back({0.0, std::fabs(frame_atom_value(lv, x0, x0))});
  for (int sidx = 1; sidx <= o.steps; ++sidx) {
    const double th = pi * sidx / o.steps;
    double worst = 0.0;
    for (int r = 0; r < rays; ++r) {
      const double ph = 2.0 * pi * r / rays;
      const Vec3 dir = std::cos(ph) * e1 + std::sin(ph) * e2;
      const Vec3 y = std::cos(th) * x0 + std::sin(th) * dir;
      worst = std::max(worst, std::fabs(frame_atom_value(lv, x0, y)));
    }
    rows.push_back({th, worst});
  }
  write_tsv(out, {"theta", "max_abs"}, rows);

  const LocalizationReport rep = localization_profile(fs, o.level, o.atom, rays, o.steps);
  std::cout << "atom (" << o.level << ", " << o.atom << "): center "
            << rep.center_value << ", sup " << rep.sup_abs << ", decay constants c2 "
            << rep.c2 << ", c4 " << rep.c4 << ", c6 " << rep.c6 << "\n";
  std::cout << "profile -> " << out << "\n";
}

// ---------------------------------------------------------------------------
// selftest

void run_selftest_cmd(const CommonOpts& common) {
  write_run_manifest(join(common.out_dir, "selftest.mrrun"), "selftest", {});
  const std::vector<CriterionResult> rs = run_selftest(std::cout);
  if (!selftest_passed(rs)) g_exit = 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandlimited sampling, splines, cubature and frames on S2, S2xS2, SO(3)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(manirad::version_string));
  app.set_config("--config", "", "read key=value defaults from a file");

  CommonOpts common;
  app.add_option("--out-dir", common.out_dir, "directory for outputs and manifests");
  app.add_option("--threads", common.threads,
                 "worker thread cap (default: MR_THREADS or hardware)");

  LatticeOpts lat;
  CLI::App* c_lat = app.add_subcommand("lattice", "generate and certify a metric lattice");
  c_lat->add_option("--manifold", lat.manifold, "S2, SO3 or S2xS2")
      ->check(CLI::IsMember({"S2", "SO3", "S2xS2"}));
  c_lat->add_option("--rho", lat.rho, "target density")->required();
  c_lat->add_flag("--symmetric", lat.symmetric, "antipodally symmetric lattice");
  c_lat->add_option("--seed", lat.seed, "rng seed");
  c_lat->add_option("--out", lat.out, "output file (.mrlat)");
  c_lat->callback([&] {
    apply_threads(common);
    run_lattice(common, lat);
  });

  CubatureOpts cub;
  CLI::App* c_cub = app.add_subcommand("cubature", "positive weights exact on E_omega");
  c_cub->add_option("--lattice", cub.lattice, "node file (.mrlat); generated if absent");
  c_cub->add_option("--manifold", cub.manifold, "S2, SO3 or S2xS2")
      ->check(CLI::IsMember({"S2", "SO3", "S2xS2"}));
  c_cub->add_option("--rho", cub.rho, "density when generating nodes");
  c_cub->add_flag("--symmetric", cub.symmetric, "symmetric generated nodes");
  c_cub->add_option("--seed", cub.seed, "rng seed for generated nodes");
  c_cub->add_option("--omega", cub.omega, "exactness bandwidth")->required();
  c_cub->add_option("--out", cub.out, "output file (.mrcub)");
  c_cub->callback([&] {
    apply_threads(common);
    if (cub.lattice.empty() && cub.rho <= 0.0)
      throw CLI::RequiredError("cubature: --lattice or --rho");
    run_cubature(common, cub);
  });

  RadonOpts rad;
  CLI::App* c_rad = app.add_subcommand("radon", "apply a mean transform spectrally");
  c_rad->add_option("--transform", rad.transform, "funk, hemi or so3")
      ->check(CLI::IsMember({"funk", "hemi", "so3"}))
      ->required();
  c_rad->add_option("--direction", rad.direction, "forward or inverse")
      ->check(CLI::IsMember({"forward", "inverse"}));
  c_rad->add_option("--in", rad.in, "input coefficients (.mrcoef)")->required();
  c_rad->add_option("--out", rad.out, "output coefficients (.mrcoef)");
  c_rad->callback([&] {
    apply_threads(common);
    run_radon(common, rad);
  });

  SplineOpts spl;
  CLI::App* c_spl = app.add_subcommand("spline", "variational interpolation");
  c_spl->add_option("--problem", spl.problem, "problem file (.mrspl)")->required();
  c_spl->add_option("--t", spl.t, "smoothness override (default: the file's t)");
  c_spl->add_option("--out", spl.out, "output coefficients (.mrcoef)");
  c_spl->callback([&] {
    apply_threads(common);
    run_spline(common, spl);
  });

  InvertOpts inv;
  CLI::App* c_inv = app.add_subcommand("invert", "recover f from transform samples");
  c_inv->add_option("--transform", inv.transform, "funk, hemi or so3")
      ->check(CLI::IsMember({"funk", "hemi", "so3"}))
      ->required();
  c_inv->add_option("--method", inv.method, "spline, discrete, iterative or frame")
      ->check(CLI::IsMember({"spline", "discrete", "iterative", "frame"}))
      ->required();
  c_inv->add_option("--problem", inv.problem, "point samples of the image (.mrspl)");
  c_inv->add_option("--cubature", inv.cubature, "sample nodes and weights (.mrcub)");
  c_inv->add_option("--lattice", inv.lattice, "sample nodes (.mrlat)");
  CLI::Option* inv_in =
      c_inv->add_option("--in", inv.in, "image coefficients, sampled synthetically");
  c_inv->add_option("--values", inv.values, "raw sample values, one per line")
      ->excludes(inv_in);
  c_inv->add_option("--truth", inv.truth, "reference f for error reporting");
  c_inv->add_option("--omega", inv.omega, "bandwidth of the recovered f");
  c_inv->add_option("--t", inv.t, "spline smoothness");
  c_inv->add_option("--levels", inv.levels, "spline approximation levels")
      ->delimiter(',');
  c_inv->add_option("--tol", inv.tol, "iteration tolerance");
  c_inv->add_option("--max-steps", inv.max_steps, "iteration cap");
  c_inv->add_option("--gamma", inv.gamma, "frame relaxation parameter");
  c_inv->add_option("--out", inv.out, "output coefficients (.mrcoef)");
  c_inv->callback([&] {
    apply_threads(common);
    if (inv.method == "spline" && inv.problem.empty())
      throw CLI::RequiredError("invert --method spline: --problem");
    if (inv.method == "discrete" && inv.cubature.empty())
      throw CLI::RequiredError("invert --method discrete: --cubature");
    if ((inv.method == "iterative" || inv.method == "frame") && inv.lattice.empty())
      throw CLI::RequiredError("invert --method " + inv.method + ": --lattice");
    if (inv.method != "spline") {
      if (inv.in.empty() && inv.values.empty())
        throw CLI::RequiredError("invert: --in or --values");
      if (inv.omega <= 0.0) throw CLI::RequiredError("invert: --omega");
    }
    run_invert(common, inv);
  });

  ReconstructOpts rec;
  CLI::App* c_rec =
      app.add_subcommand("reconstruct", "recover bandlimited f from point samples");
  c_rec->add_option("--method", rec.method, "voronoi, iterative or frame")
      ->check(CLI::IsMember({"voronoi", "iterative", "frame"}));
  c_rec->add_option("--lattice", rec.lattice, "sample nodes (.mrlat)")->required();
  CLI::Option* rec_in =
      c_rec->add_option("--in", rec.in, "coefficients to sample synthetically");
  c_rec->add_option("--values", rec.values, "raw sample values, one per line")
      ->excludes(rec_in);
  c_rec->add_option("--omega", rec.omega, "bandwidth of the recovered f")->required();
  c_rec->add_option("--tol", rec.tol, "iteration tolerance");
  c_rec->add_option("--max-steps", rec.max_steps, "iteration cap");
  c_rec->add_option("--gamma", rec.gamma, "frame relaxation parameter");
  c_rec->add_option("--out", rec.out, "output coefficients (.mrcoef)");
  c_rec->add_option("--trace", rec.trace, "iteration trace table (.tsv)");
  c_rec->callback([&] {
    apply_threads(common);
    if (rec.in.empty() && rec.values.empty())
      throw CLI::RequiredError("reconstruct: --in or --values");
    run_reconstruct(common, rec);
  });

  FrameOpts frm;
  CLI::App* c_frm = app.add_subcommand("frame", "parseval frames of bandlimited atoms");
  c_frm->require_subcommand(1);
  CLI::App* c_build = c_frm->add_subcommand("build", "construct a frame system");
  c_build->add_option("--jmax", frm.jmax, "finest dyadic level")->required();
  c_build->add_option("--lattice-constant", frm.lattice_constant,
                      "per-level density constant");
  c_build->add_option("--seed", frm.seed, "rng seed");
  c_build->add_option("--check-functions", frm.check_functions,
                      "random functions for the parseval report");
  c_build->add_option("--out", frm.out, "output stem (writes <stem>.mrfrm + levels)");
  c_build->callback([&] {
    apply_threads(common);
    run_frame_build(common, frm);
  });

  CLI::App* c_an = c_frm->add_subcommand("analyze", "frame coefficients of f");
  c_an->add_option("--frame", frm.frame, "frame manifest (.mrfrm)")->required();
  c_an->add_option("--in", frm.in, "input coefficients (.mrcoef)")->required();
  c_an->add_option("--out", frm.out, "coefficient table (.tsv)");
  c_an->callback([&] {
    apply_threads(common);
    run_frame_analyze(common, frm);
  });

  CLI::App* c_sy = c_frm->add_subcommand("synthesize", "sum atoms against coefficients");
  c_sy->add_option("--frame", frm.frame, "frame manifest (.mrfrm)")->required();
  c_sy->add_option("--coeffs", frm.coeffs, "coefficient table (.tsv)")->required();
  c_sy->add_option("--out", frm.out, "output coefficients (.mrcoef)");
  c_sy->callback([&] {
    apply_threads(common);
    run_frame_synthesize(common, frm);
  });

  CLI::App* c_lo = c_frm->add_subcommand("localize", "spatial decay profile of an atom");
  c_lo->add_option("--frame", frm.frame, "frame manifest (.mrfrm)")->required();
  c_lo->add_option("--level", frm.level, "dyadic level")->required();
  c_lo->add_option("--atom", frm.atom, "atom index within the level");
  c_lo->add_option("--steps", frm.steps, "angular resolution of the profile");
  c_lo->add_option("--out", frm.out, "profile table (.tsv)");
  c_lo->callback([&] {
    apply_threads(common);
    run_frame_localize(common, frm);
  });

  CLI::App* c_self = app.add_subcommand("selftest", "run the acceptance criteria");
  c_self->callback([&] {
    apply_threads(common);
    run_selftest_cmd(common);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  } catch (const manirad::certification_error& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 2;
  } catch (const manirad::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return g_exit;
}
