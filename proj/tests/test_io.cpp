#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "manirad/frames.hpp"
#include "manirad/io.hpp"

using namespace manirad;
namespace sfs = std::filesystem;

namespace {

struct TempDir {
  sfs::path dir;
  TempDir() {
    dir = sfs::temp_directory_path() /
          ("manirad-io-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter()++));
    sfs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    sfs::remove_all(dir, ec);
  }
  std::string p(const std::string& name) const { return (dir / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("coefficient files round trip bit for bit on every manifold",
          "[io]") {
  TempDir td;
  Rng rng(121);
  for (const Manifold m : {Manifold::S2, Manifold::SO3, Manifold::S2xS2}) {
    const HarmonicCoefficients c = random_coefficients(m, 12.0, rng);
    const std::string path = td.p("c.mrcoef");
    write_coefficients(path, c);
    const HarmonicCoefficients back = read_coefficients(path);
    CHECK(back.manifold() == m);
    CHECK(back.omega() == c.omega());
    CHECK(linear_combination(1.0, c, -1.0, back).norm() == 0.0);
    // a rewrite of the parsed object is byte identical
    const std::string again = td.p("c2.mrcoef");
    write_coefficients(again, back);
    CHECK(slurp(path) == slurp(again));
  }
}

TEST_CASE("coefficient parsing rejects malformed and inconsistent input",
          "[io]") {
  TempDir td;
  const std::string path = td.p("bad.mrcoef");
  spit(path, "WRONG v1 manifold=S2 omega=6\n");
  CHECK_THROWS_AS(read_coefficients(path), io_error);
  spit(path, "MRCOEF v1 manifold=S2\n");  // omega missing
  CHECK_THROWS_AS(read_coefficients(path), io_error);
  spit(path, "MRCOEF v1 manifold=S2 omega=6\n2 1 0.5\n2 1 0.7\n");
  CHECK_THROWS_AS(read_coefficients(path), io_error);  // duplicate slot
  spit(path, "MRCOEF v1 manifold=S2 omega=6\n4 1 0.5\n");
  CHECK_THROWS_AS(read_coefficients(path), io_error);  // beyond bandwidth
  spit(path, "MRCOEF v1 manifold=S2 omega=6\n2 1 0.5 junk\n");
  CHECK_THROWS_AS(read_coefficients(path), io_error);  // trailing tokens
  spit(path, "MRCOEF v1 manifold=S2 omega=6\nnot numbers\n");
  CHECK_THROWS_AS(read_coefficients(path), io_error);
  spit(path, "");
  CHECK_THROWS_AS(read_coefficients(path), io_error);
  CHECK_THROWS_AS(read_coefficients(td.p("missing.mrcoef")), io_error);
  // io failures are catchable as precondition failures, never as
  // certification failures
  try {
    read_coefficients(td.p("missing.mrcoef"));
    FAIL("expected a throw");
  } catch (const certification_error&) {
    FAIL("io errors must not be certification errors");
  } catch (const precondition_error&) {
    SUCCEED();
  }
}

TEST_CASE("lattice files reload with a fresh certificate", "[io]") {
  TempDir td;
  const Lattice L = generate_lattice(Manifold::S2, 0.3, true, 17);
  const std::string path = td.p("l.mrlat");
  write_lattice(path, L);
  const Lattice back = read_lattice(path);
  REQUIRE(back.size() == L.size());
  CHECK(back.symmetric == L.symmetric);
  CHECK(back.rho == L.rho);
  for (std::size_t i = 0; i < L.size(); ++i)
    CHECK((std::get<Vec3>(back.pts[i]) - std::get<Vec3>(L.pts[i])).norm() == 0.0);
  // read_lattice re-certifies instead of trusting the file
  CHECK(back.cert.separation == Catch::Approx(L.cert.separation).margin(1e-14));
  CHECK(back.cert.covering > 0.0);

  spit(path, "MRLAT v1 manifold=S2 rho=0.3 symmetric=0\n1 1 1\n");
  CHECK_THROWS_AS(read_lattice(path), io_error);  // off the sphere
  spit(path, "MRLAT v1 manifold=S2 rho=0.3 symmetric=0\n");
  CHECK_THROWS_AS(read_lattice(path), io_error);  // no points

  // rotation lattices round trip through euler angles
  const Lattice R = generate_lattice(Manifold::SO3, 0.7, false, 18);
  const std::string rpath = td.p("r.mrlat");
  write_lattice(rpath, R);
  const Lattice rback = read_lattice(rpath);
  REQUIRE(rback.size() == R.size());
  for (std::size_t i = 0; i < R.size(); ++i)
    CHECK(so3_distance(std::get<RotationPoint>(rback.pts[i]),
                       std::get<RotationPoint>(R.pts[i])) < 1e-12);
}

TEST_CASE("cubature files carry a verifiable exactness certificate", "[io]") {
  TempDir td;
  const Lattice L = generate_lattice(Manifold::S2, 0.3, false, 19);
  const Cubature C = compute_cubature(L, 6.0);
  const std::string path = td.p("c.mrcub");
  write_cubature(path, C);
  const Cubature back = read_cubature(path, true);
  CHECK(back.omega_exact == 6.0);
  CHECK(back.residual <= 1e-10);
  CHECK((back.weights - C.weights).cwiseAbs().maxCoeff() == 0.0);

  // forging a stronger certificate than the weights support must fail the
  // verifying read
  std::string text = slurp(path);
  const auto at = text.find("omega=6");
  REQUIRE(at != std::string::npos);
  text.replace(at, 7, "omega=42");
  spit(path, text);
  CHECK_THROWS_AS(read_cubature(path, true), certification_error);
  CHECK_NOTHROW(read_cubature(path, false));  // trusting read still parses

  spit(path, "MRCUB v1 manifold=S2 omega=6\n0 0 1 -0.5\n");
  CHECK_THROWS_AS(read_cubature(path), io_error);  // nonpositive weight
}

TEST_CASE("spline problems round trip every functional kind", "[io]") {
  TempDir td;
  Rng rng(122);
  FunctionalSet fs;
  fs.manifold = Manifold::S2;
  fs.items.push_back(PointEvalF{Point(rng.sphere_point())});
  fs.items.push_back(SymPointPairF{rng.sphere_point()});
  fs.items.push_back(CircleIntegralF{great_circle(rng.sphere_point())});
  fs.items.push_back(HemisphereIntegralF{rng.sphere_point()});
  std::vector<double> vals = {1.5, -0.25, 0.0625, 3.0};
  const std::string path = td.p("p.mrspl");
  write_spline_problem(path, fs, vals, 1.75);
  const SplineProblem back = read_spline_problem(path);
  CHECK(back.t == 1.75);
  CHECK(back.functionals.manifold == Manifold::S2);
  REQUIRE(back.functionals.size() == fs.size());
  REQUIRE(back.values.size() == vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) CHECK(back.values[i] == vals[i]);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    CHECK(back.functionals.items[i].index() == fs.items[i].index());
    CHECK(detail::functional_distance(back.functionals.items[i], fs.items[i]) <
          1e-12);
  }

  // rotation circle functionals live in their own file flavor
  FunctionalSet so3;
  so3.manifold = Manifold::SO3;
  so3.items.push_back(SO3CircleIntegralF{rng.sphere_point(), rng.sphere_point()});
  write_spline_problem(td.p("q.mrspl"), so3, {0.5}, 2.5);
  const SplineProblem sb = read_spline_problem(td.p("q.mrspl"));
  CHECK(sb.functionals.manifold == Manifold::SO3);
  CHECK(std::holds_alternative<SO3CircleIntegralF>(sb.functionals.items.at(0)));

  spit(path, "MRSPL v1 manifold=S2 t=1.5\nwavelet 0 0 1 0.5\n");
  CHECK_THROWS_AS(read_spline_problem(path), io_error);  // unknown kind
  CHECK_THROWS_AS(write_spline_problem(td.p("z.mrspl"), fs, {1.0}, 1.5),
                  precondition_error);  // value count mismatch
}

TEST_CASE("frame manifests reference reloadable per-level files", "[io]") {
  TempDir td;
  const FrameSystem fs = build_frame(1);
  const std::string path = td.p("f.mrfrm");
  write_frame(path, fs);
  CHECK(sfs::exists(td.p("f-level0.mrlat")));
  CHECK(sfs::exists(td.p("f-level1.mrcub")));
  const FrameSystem back = read_frame(path, true);
  REQUIRE(back.levels.size() == fs.levels.size());
  CHECK(back.coverage == fs.coverage);
  for (std::size_t j = 0; j < fs.levels.size(); ++j) {
    CHECK(back.levels[j].atoms() == fs.levels[j].atoms());
    CHECK((back.levels[j].b - fs.levels[j].b).cwiseAbs().maxCoeff() == 0.0);
  }
  // the reloaded frame analyzes identically
  Rng rng(123);
  const HarmonicCoefficients f = random_coefficients(Manifold::S2, fs.coverage, rng);
  const FrameCoefficients ca = frame_analyze(f, fs);
  const FrameCoefficients cb = frame_analyze(f, back);
  for (std::size_t j = 0; j < ca.level.size(); ++j)
    CHECK((ca.level[j] - cb.level[j]).cwiseAbs().maxCoeff() == 0.0);

  // weakening a level certificate in the manifest chain is caught
  const std::string cub = td.p("f-level1.mrcub");
  std::string text = slurp(cub);
  const auto at = text.find("omega=");
  REQUIRE(at != std::string::npos);
  const auto sp = text.find_first_of(" \n", at);
  text.replace(at, sp - at, "omega=6");
  spit(cub, text);
  CHECK_THROWS_AS(read_frame(path, false), certification_error);
}

TEST_CASE("run manifests record the version, command and parameters", "[io]") {
  TempDir td;
  const std::string path = td.p("run.mrrun");
  write_run_manifest(path, "lattice", {{"manifold", "S2"}, {"rho", "0.3"}});
  const std::string text = slurp(path);
  CHECK(text == std::string("MRRUN v1\nversion ") + version_string +
                    "\ncommand lattice\nmanifold S2\nrho 0.3\n");
}
