#pragma once

#include <string>
#include <vector>

#include "desing/mesh.hpp"
#include "desing/sphere.hpp"
#include "desing/tower.hpp"

namespace desing {

struct InitialSurfaceSpec {
  enum class Variant { M, N };
  Variant variant = Variant::M;
  int k = 2, m = 1;
  // M data
  int n1 = 1, n2 = 1, sigma = 0;
  // N data
  int n = 1, np1 = 1, npm1 = 1, sp1 = 0, spm1 = 0;

  static InitialSurfaceSpec M(int k, int m, int n1, int n2, int sigma);
  static InitialSurfaceSpec N(int k, int m, int n, int np1, int npm1, int sp1, int spm1);

  // Throws invalid-argument on bad ranges or non-coprime data.
  void validate() const;
  int expected_genus() const;
  std::string label() const;
};

// Desk-scale placement of the straightening window [a, b] in tower units.
// a = clamp(m pi/4 - offset, corner, T_u - width), b = min(a + width, T_u).
struct StraighteningPolicy {
  bool verbatim = false;  // use a = m pi/4 - 10 verbatim
  double offset = 0.0;
  double width = 1.0;
  double min_width = 0.2;
};

struct AssemblyOptions {
  int resolution = 32;
  StraighteningPolicy straightening;
  double region_b = 5.0;
};

struct TowerPlacement {
  int k_C = 2;
  int m_C = 1;
  double T_u = 0;  // truncation radius in tower units
  Straightening st;
  SphereIsometry R;  // applied after Phi
  GreatCircle axis;  // R C_1
  std::string label;
};

// Where a vertex came from: tower, group copy, chart parameter.
struct VertexOrigin {
  int tower = -1;
  TowerGroupElement g;
  cplx xi;
};

struct AssembledSurface {
  InitialSurfaceSpec spec;
  AssemblyOptions options;
  SurfaceMesh mesh;
  std::vector<TowerPlacement> towers;
  std::vector<VertexOrigin> origin;
  int lattice_Q = 0;  // seam lattice step is pi / (2Q) along every seam fiber
  EdgeStats edges;
  double min_angle_deg = 0;

  double h() const { return edges.mean; }
};

std::vector<TowerPlacement> tower_placements(const InitialSurfaceSpec& spec,
                                             const StraighteningPolicy& policy);
Straightening desk_straightening(int k_C, int m, double T_u, const StraighteningPolicy& policy);

// Straightened, truncated tower in tower units for the fundamental piece.
Vec3 straightened_point(const TowerChart& ch, const Straightening& st, cplx xi);
// Full S^3 map for one tower copy.
Vec4 tower_surface_point(const TowerPlacement& T, const TowerChart& ch, const TowerGroupElement& g,
                         cplx xi);

// Chart parameters of the fundamental piece: (n_u+1)(n_z+1) points, index i + (n_u+1) j,
// with i = n_u on the truncation seam.
struct PieceSamples {
  int n_u = 0, n_z = 0;
  std::vector<cplx> xi;
};
PieceSamples fundamental_piece(const TowerPlacement& T, int n_z);

AssembledSurface assemble(const InitialSurfaceSpec& spec, const AssemblyOptions& opt = {});

// The rotation positioning the C' towers of N.
SphereIsometry n_tower_base_rotation();

// max over vertices v of from, distance from g(v) to the triangles of to.
double one_sided_distance(const SurfaceMesh& from, const SphereIsometry& g, const SurfaceMesh& to);
double symmetry_residual(const SurfaceMesh& mesh, const SphereIsometry& g);
double symmetry_invariance(const SurfaceMesh& mesh, const std::vector<SphereIsometry>& group);
// -1, +1 from normals; 0 when inconsistent (g is not a symmetry of the oriented mesh).
int mesh_parity(const SurfaceMesh& mesh, const SphereIsometry& g, double tol = 1e-6);
// Symmetry group of the assembled surface: G for M, G' for N.
std::vector<SphereIsometry> surface_group(const InitialSurfaceSpec& spec);

// Vertex permutation induced by an isometry, -1 where no vertex matches.
std::vector<int> vertex_permutation(const SurfaceMesh& mesh, const SphereIsometry& g,
                                    double tol = 1e-9);

struct RegionStats {
  size_t tower_vertices = 0, torus_vertices = 0, overlap_vertices = 0;
  bool covers = false, towers_disjoint = false, overlaps_adjacent = false;
  std::vector<double> tag_radius;  // a / m_C per tower
};

RegionStats region_decomposition(AssembledSurface& s);

double scaffold_residual(const AssembledSurface& s, int samples_per_circle = 2000);

enum class Alignment { aligned, antialigned };
Alignment alignment_invariant(const AssembledSurface& s,
                              const SphereIsometry& congruence = SphereIsometry{});

}  // namespace desing
