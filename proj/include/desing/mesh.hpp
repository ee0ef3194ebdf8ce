#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "desing/types.hpp"

namespace desing {

struct RegionTag {
  enum class Kind { tower, torus };
  Kind kind = Kind::torus;
  int circle_id = -1;     // tower index for tower regions
  int component_id = -1;  // toral component for torus regions
  int m_C = 0, k_C = 0;
  bool overlap = false;
};

// Half-edge h = 3f + c runs from tri[f][c] to tri[f][(c+1)%3].
struct HalfEdges {
  std::vector<int> twin;
  int next(int h) const { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  int face(int h) const { return h / 3; }
};

struct SurfaceMesh {
  std::vector<Vec4> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec4> normals;
  std::vector<RegionTag> tags;
  HalfEdges half_edges;
};

struct MeshAudit {
  bool watertight = false;
  bool oriented = false;  // every interior edge traversed once in each direction
  size_t boundary_edges = 0;
  size_t nonmanifold_edges = 0;
  int components = 0;
  size_t V = 0, E = 0, F = 0;
};

MeshAudit audit_mesh(const SurfaceMesh& mesh);
// Flip triangles so adjacent faces agree; false when the surface is non-orientable.
bool orient_consistently(SurfaceMesh& mesh);
// Requires a watertight, oriented mesh; throws non-watertight otherwise.
void build_half_edges(SurfaceMesh& mesh);
int genus(const SurfaceMesh& mesh);
int euler_characteristic(const SurfaceMesh& mesh);

// Vector orthogonal to a, b, c with det(a, b, c, n) = |n|^2.
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c);
Vec4 face_normal(const SurfaceMesh& mesh, int f);  // unit, tangent to S^3 at the centroid
void compute_vertex_normals(SurfaceMesh& mesh);

struct EdgeStats {
  double min = 0, max = 0, mean = 0;
};
EdgeStats edge_lengths(const SurfaceMesh& mesh);

// Uniform-grid hash in R^4.
class PointLocator4 {
 public:
  PointLocator4(const std::vector<Vec4>& pts, double cell);
  // Nearest point within the 3^4 neighbourhood, or -1.
  int nearest(const Vec4& q, double* dist = nullptr) const;

  using Key = std::array<int, 4>;
  struct KeyHash {
    size_t operator()(const Key& k) const noexcept;
  };

 private:
  Key key(const Vec4& p) const;
  const std::vector<Vec4>& pts_;
  double cell_;
  std::unordered_map<Key, std::vector<int>, KeyHash> grid_;
};

class TriangleLocator4 {
 public:
  TriangleLocator4(const SurfaceMesh& mesh, double cell);
  // Distance from q to the union of triangles (chordal, in R^4).
  double distance(const Vec4& q) const;
  // Triangles whose bounding boxes meet the box [lo, hi].
  std::vector<int> candidates(const Vec4& lo, const Vec4& hi) const;

 private:
  using Key = std::array<int, 4>;
  struct KeyHash {
    size_t operator()(const Key& k) const noexcept;
  };
  const SurfaceMesh& mesh_;
  double cell_;
  std::unordered_map<Key, std::vector<int>, KeyHash> grid_;
};

Vec4 closest_point_on_triangle(const Vec4& p, const Vec4& a, const Vec4& b, const Vec4& c);

struct EmbeddednessReport {
  std::vector<std::pair<int, int>> intersecting;
  std::vector<int> degenerate;
};

EmbeddednessReport embeddedness_check(const SurfaceMesh& mesh);

// Closed torus from a doubly 2pi-periodic map sampled on an n_s x n_t grid.
SurfaceMesh periodic_grid_mesh(int n_s, int n_t, const std::function<Vec4(double, double)>& f);

}  // namespace desing
