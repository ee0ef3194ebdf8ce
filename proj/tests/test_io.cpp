#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "desing/acceptance.hpp"
#include "desing/error.hpp"
#include "desing/io.hpp"
#include "desing/sphere.hpp"

using namespace desing;

namespace {

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("desing_io_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SurfaceMesh clifford_mesh(int n) {
  CliffordTorus T = clifford_torus_of(circle_C1());
  return periodic_grid_mesh(n, n, [&](double s, double t) { return T.sample(s, t); });
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("stereographic projection") {
    const Vec4 N(0, 0, 0, 1);
    // The equator lands on the unit sphere, the antipode at the origin.
    Vec3 e = stereographic(Vec4(1, 0, 0, 0), N);
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK(stereographic(-N, N).norm() < 1e-15);
    CHECK_THROWS_AS(stereographic(N, N), Error);
    // The chosen pole stays clear of the Clifford torus (distance at least the axis gap).
    SurfaceMesh M = clifford_mesh(16);
    Vec4 P = choose_pole(M);
    double gap = 2;
    for (const auto& v : M.vertices) gap = std::min(gap, (v - P).norm());
    CHECK(gap > 0.5);
  }

  TEST_CASE("OBJ export keeps raw coordinates") {
    SurfaceMesh M = clifford_mesh(8);
    const std::string path = tmp("mesh.obj");
    write_obj(M, path, std::nullopt, {"clifford torus"});
    std::istringstream in(slurp(path));
    std::string line;
    size_t v = 0, v4 = 0, f = 0;
    double worst = 0;
    while (std::getline(in, line)) {
      if (line.rfind("#v4 ", 0) == 0) {
        std::istringstream ls(line.substr(4));
        Vec4 p;
        ls >> p[0] >> p[1] >> p[2] >> p[3];
        worst = std::max(worst, (p - M.vertices[v4]).norm());
        ++v4;
      } else if (line.rfind("v ", 0) == 0) {
        ++v;
      } else if (line.rfind("f ", 0) == 0) {
        ++f;
      }
    }
    CHECK(v == M.vertices.size());
    CHECK(v4 == M.vertices.size());
    CHECK(f == M.triangles.size());
    CHECK(worst < 1e-11);
    std::filesystem::remove(path);
  }

  TEST_CASE("PLY round trip") {
    SurfaceMesh M = clifford_mesh(12);
    std::vector<double> H(M.vertices.size(), 0.0), A(M.vertices.size(), 2.0);
    H[3] = -0.25;
    const std::string path = tmp("mesh.ply");
    write_ply(M, path, &H, &A);
    PlyData D = read_ply(path);
    REQUIRE(D.vertices.size() == M.vertices.size());
    REQUIRE(D.faces.size() == M.triangles.size());
    for (size_t i = 0; i < M.vertices.size(); ++i)
      for (int c = 0; c < 4; ++c) CHECK(D.vertices[i][c] == float(M.vertices[i][c]));
    for (size_t t = 0; t < M.triangles.size(); ++t) CHECK(D.faces[t] == M.triangles[t]);
    REQUIRE(D.extra_properties == std::vector<std::string>{"H", "normSqA"});
    CHECK(D.extra[0][3] == -0.25f);
    CHECK(D.extra[1][7] == 2.0f);
    CHECK(slurp(path).find("format binary_little_endian 1.0") != std::string::npos);
    std::vector<double> wrong(3);
    CHECK_THROWS_AS(write_ply(M, path, &wrong), Error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_ply(path), Error);
  }

  TEST_CASE("config parsing") {
    const std::set<std::string> keys = {"k", "tol", "ms", "seed"};
    RunConfig c = RunConfig::parse("# header\nk = 3  # inline\n\ntol=1e-8\nms = 4, 8,16\n", keys);
    CHECK(c.get_int("k", 0) == 3);
    CHECK(c.get_positive("tol", 1) == 1e-8);
    CHECK(c.get_int_list("ms", {}) == std::vector<int>{4, 8, 16});
    CHECK(c.get_int("seed", 7) == 7);
    CHECK_THROWS_AS(RunConfig::parse("bogus = 1\n", keys), Error);
    CHECK_THROWS_AS(RunConfig::parse("k 3\n", keys), Error);
    CHECK_THROWS_AS(RunConfig::parse("tol = 0\n", keys).get_positive("tol", 1), Error);
    CHECK_THROWS_AS(RunConfig::parse("tol = -1e-3\n", keys).get_positive("tol", 1), Error);
    CHECK_THROWS_AS(RunConfig::parse("k = 2x\n", keys).get_int("k", 0), Error);
    // Flags override the file.
    c.set("k", "4");
    CHECK(c.get_int("k", 0) == 4);
  }

  TEST_CASE("reports are deterministic and anchored") {
    VerificationReport r{"x.y", "plumbing", "1", "<= 2", true, true, 0.123};
    const std::string a = to_json(r).dump(), b = to_json(VerificationReport{r}).dump();
    CHECK(a == b);
    CHECK(a.find("runtime") == std::string::npos);
    CHECK(to_json(r, true).dump().find("runtime_s") != std::string::npos);
    // Key order is stable.
    CHECK(a.find("\"claim\"") < a.find("\"anchor\""));
    CHECK(summary_line(r).rfind("PASS x.y", 0) == 0);
    for (const auto& c : claim_registry()) CHECK(!c.anchor.empty());
    CHECK(claim_registry().size() == 12);
    CHECK_FALSE(claim_registry().back().gating);
  }

  TEST_CASE("acceptance rows are byte-stable") {
    AcceptanceOptions o;
    const std::string a = to_json(run_criterion(4, o)).dump();
    CHECK(a == to_json(run_criterion(4, o)).dump());
    CHECK_THROWS_AS(run_criterion(13, o), Error);
  }
}
