#include <doctest.h>

#include <map>
#include <random>

#include "desing/error.hpp"
#include "desing/mesh.hpp"
#include "desing/sphere.hpp"

using namespace desing;

namespace {

SurfaceMesh clifford_mesh(int n) {
  CliffordTorus T = clifford_torus_of(circle_C1());
  return periodic_grid_mesh(n, n, [&](double s, double t) { return T.sample(s, t); });
}

// Octahedron subdivided and pushed onto the great sphere x3 = 0.
SurfaceMesh great_sphere_mesh(int levels) {
  SurfaceMesh M;
  M.vertices = {Vec4(1, 0, 0, 0), Vec4(-1, 0, 0, 0), Vec4(0, 1, 0, 0),
                Vec4(0, -1, 0, 0), Vec4(0, 0, 1, 0), Vec4(0, 0, -1, 0)};
  M.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                 {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      M.vertices.push_back((M.vertices[a] + M.vertices[b]).normalized());
      return mid[key] = int(M.vertices.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    for (auto t : M.triangles) {
      int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    M.triangles = next;
  }
  return M;
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("cross4 is orthogonal and oriented") {
    std::mt19937 rng(1);
    std::normal_distribution<double> N;
    for (int n = 0; n < 20; ++n) {
      Vec4 a, b, c;
      for (int i = 0; i < 4; ++i) a[i] = N(rng), b[i] = N(rng), c[i] = N(rng);
      Vec4 x = cross4(a, b, c);
      CHECK(std::abs(x.dot(a)) < 1e-12 * x.norm());
      CHECK(std::abs(x.dot(b)) < 1e-12 * x.norm());
      Mat4 D;
      D << a, b, c, x;
      CHECK(D.determinant() == doctest::Approx(x.squaredNorm()).epsilon(1e-10));
    }
  }

  TEST_CASE("genus oracles") {
    SurfaceMesh T = clifford_mesh(12);
    CHECK(audit_mesh(T).watertight);
    CHECK(genus(T) == 1);
    SurfaceMesh S = great_sphere_mesh(2);
    CHECK(genus(S) == 0);
    CHECK(orient_consistently(S));
    build_half_edges(S);
    for (size_t h = 0; h < S.half_edges.twin.size(); ++h)
      CHECK(S.half_edges.twin[S.half_edges.twin[h]] == int(h));
  }

  TEST_CASE("boundary is reported") {
    SurfaceMesh T = clifford_mesh(8);
    T.triangles.pop_back();
    auto a = audit_mesh(T);
    CHECK_FALSE(a.watertight);
    CHECK(a.boundary_edges == 3);
    CHECK_THROWS_AS(genus(T), Error);
  }

  TEST_CASE("orientation repair and non-orientable detection") {
    SurfaceMesh T = clifford_mesh(10);
    std::mt19937 rng(3);
    for (auto& t : T.triangles)
      if (rng() % 2) std::swap(t[1], t[2]);
    CHECK_FALSE(audit_mesh(T).oriented);
    CHECK(orient_consistently(T));
    CHECK(audit_mesh(T).oriented);

    // Klein bottle: the t-period glues with a flip in s.
    const int n = 8;
    SurfaceMesh K;
    K.vertices.resize(n * n, Vec4::Zero());
    auto id = [&](int i, int j) {
      if (j == n) return ((n - i) % n);
      return (i % n) + n * j;
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        K.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        K.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    CHECK(audit_mesh(K).watertight);
    CHECK_FALSE(orient_consistently(K));
  }

  TEST_CASE("vertex normals on the Clifford torus") {
    SurfaceMesh T = clifford_mesh(48);
    CliffordTorus C = clifford_torus_of(circle_C1());
    double worst = 0;
    for (size_t v = 0; v < T.vertices.size(); ++v) {
      CHECK(std::abs(T.normals[v].dot(T.vertices[v])) < 1e-12);
      worst = std::max(worst, 1 - std::abs(T.normals[v].dot(C.normal(T.vertices[v]))));
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("closest point against brute force") {
    std::mt19937 rng(5);
    std::normal_distribution<double> N;
    auto rv = [&] {
      Vec4 v;
      for (int i = 0; i < 4; ++i) v[i] = N(rng);
      return v;
    };
    for (int n = 0; n < 200; ++n) {
      Vec4 a = rv(), b = rv(), c = rv(), p = rv();
      Vec4 q = closest_point_on_triangle(p, a, b, c);
      double best = 1e300;
      const int G = 300;
      for (int i = 0; i <= G; ++i)
        for (int j = 0; i + j <= G; ++j) {
          Vec4 x = a + (b - a) * (double(i) / G) + (c - a) * (double(j) / G);
          best = std::min(best, (x - p).norm());
        }
      CHECK((q - p).norm() <= best + 1e-12);
      CHECK((q - p).norm() >= best - 0.05);
    }
  }

  TEST_CASE("locators") {
    SurfaceMesh T = clifford_mesh(32);
    auto es = edge_lengths(T);
    PointLocator4 loc(T.vertices, es.min);
    for (size_t v = 0; v < T.vertices.size(); v += 7) {
      double d;
      CHECK(loc.nearest(T.vertices[v], &d) == int(v));
      CHECK(d == 0.0);
    }
    TriangleLocator4 tl(T, es.max);
    CliffordTorus C = clifford_torus_of(circle_C1());
    for (int n = 0; n < 50; ++n) {
      Vec4 p = C.sample(0.37 * n, 1.1 * n);
      CHECK(tl.distance(p) < es.max * es.max);
    }
    CHECK(tl.distance(Vec4(1, 0, 0, 0)) > 0.5);
  }

  TEST_CASE("embeddedness oracles") {
    SurfaceMesh T = clifford_mesh(24);
    CHECK(embeddedness_check(T).intersecting.empty());
    CHECK(embeddedness_check(great_sphere_mesh(2)).intersecting.empty());

    // Two copies of the same torus.
    SurfaceMesh D = T;
    const int off = int(D.vertices.size());
    for (const auto& v : T.vertices) D.vertices.push_back(v);
    for (auto t : T.triangles) D.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
    CHECK_FALSE(embeddedness_check(D).intersecting.empty());

    // Transversal tori: C1-torus and the torus around C(0,0) cross.
    CliffordTorus U = clifford_torus_of(circle_C(0, 0));
    SurfaceMesh X = periodic_grid_mesh(24, 24, [&](double s, double t) { return U.sample(s, t); });
    SurfaceMesh Y = T;
    const int o2 = int(Y.vertices.size());
    for (const auto& v : X.vertices) Y.vertices.push_back(v);
    for (auto t : X.triangles) Y.triangles.push_back({t[0] + o2, t[1] + o2, t[2] + o2});
    CHECK_FALSE(embeddedness_check(Y).intersecting.empty());

    // Slivers are flagged, not fatal.
    SurfaceMesh S = T;
    S.vertices.push_back(S.vertices[0]);
    S.vertices.push_back(S.vertices[1]);
    S.vertices.push_back(0.5 * (S.vertices[0] + S.vertices[1]));
    const int n = int(S.vertices.size());
    S.triangles.push_back({n - 3, n - 2, n - 1});
    S.triangles.push_back({n - 3, n - 3, n - 2});
    auto rep = embeddedness_check(S);
    CHECK(rep.degenerate.size() == 2);
  }
}
