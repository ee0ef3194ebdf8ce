#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "desing/assembly.hpp"

namespace desing {

enum class Ambient { euclidean, sphere };

struct FundamentalForms {
  Mat2 g = Mat2::Identity();
  Mat2 A = Mat2::Zero();  // nu-directed
  double H = 0;           // trace(g^-1 A)
  double normSqA = 0;     // trace((g^-1 A)^2)
  Vec4 normal = Vec4::Zero();
};

// Euclidean patches are passed with a zero fourth coordinate.
using Chart4 = std::function<Vec4(double, double)>;

// Central differences; first derivatives use eps^(1/3) * scale, second eps^(1/4) * scale.
Jet4 fd_jet(const Chart4& f, double u, double v, double scale = 1.0);
// nu is orthogonal to p (sphere) or to e_4 (euclidean); its sign follows the hint when given.
FundamentalForms forms_from_jet(const Jet4& J, Ambient amb, const Vec4& normal_hint = Vec4::Zero());
// Richardson extrapolation when |A|^2 disagrees by more than 10% between steps h and h/2.
FundamentalForms forms_at(const Chart4& f, double u, double v, Ambient amb,
                          const Vec4& normal_hint = Vec4::Zero(), double scale = 1.0);

Jet4 lift(const Jet3& J);

// ---- curvature on assembled surfaces ----

// Chart around a vertex: (u, v) -> surface point at xi_v + u + i v.
Chart4 vertex_chart(const AssembledSurface& S, int v);
Chart4 piece_chart(const AssembledSurface& S, int tower, const TowerGroupElement& g);
FundamentalForms surface_forms(const AssembledSurface& S, int v);
// |A|^2 at every vertex, from the charts.
Eigen::VectorXd surface_normSqA(const AssembledSurface& S);

// sup |H| over the fundamental piece and its image under the Gamma_c reflection, every tower.
double sup_mean_curvature(const AssembledSurface& S, int refine = 1);

struct ScalingFit {
  std::vector<int> m;
  std::vector<double> supH;
  double exponent = 0;
};
// Fits sup|H| ~ m^p for M(k, m, n1, n2, sigma) over the m list.
ScalingFit mean_curvature_scaling(int k, int n1, int n2, int sigma, const std::vector<int>& ms,
                                  int resolution = 32);

struct ToralReport {
  double sup_A_weighted = 0;   // sup | |A|^2 - 2 | e^{m d} / m
  double sup_H_weighted = 0;   // sup |H| e^{m d} / m
  double deep_deviation = 0;   // sup | |A|^2 - 2 | where d >= 2 / m
  double fitted_rate = 0;      // -slope of log| |A|^2 - 2 | against d
  size_t samples = 0;
};
// d is the spherical distance to the boundary of T_b.
ToralReport verify_toral_estimates(const AssembledSurface& S);
// Exact Clifford torus control: all deviations vanish.
ToralReport clifford_control_report(int n = 32);

struct TowerComparison {
  double metric = 0;      // sup |m_C^2 g_S - g_E| / |g_E|
  double curvature = 0;   // sup |m_C^-2 |A_S|^2 - |A_E|^2| / max(1, |A_E|^2)
};
TowerComparison tower_region_comparison(const AssembledSurface& S);

// ---- discrete Jacobi operator ----

struct DiscreteJacobi {
  Eigen::SparseMatrix<double> W;  // cotangent stiffness, positive semidefinite
  Eigen::VectorXd mass;           // mixed Voronoi areas
  Eigen::VectorXd potential;      // |A|^2 + Ric(nu, nu)
  std::vector<std::vector<int>> perms;  // perms[g][v] = index of g(v)
  std::vector<int> parity;

  Eigen::VectorXd laplacian(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  // (g u)(x) = (-1)^g u(g^-1 x)
  Eigen::VectorXd act(size_t g, const Eigen::VectorXd& u) const;
  Eigen::VectorXd project_odd(const Eigen::VectorXd& u) const;
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;  // mass weighted
};

DiscreteJacobi build_jacobi(const SurfaceMesh& mesh, const Eigen::VectorXd& normSqA,
                            double ricci = 2.0);
// Records the vertex permutations; the potential is averaged over orbits.
void attach_symmetry(DiscreteJacobi& L, const SurfaceMesh& mesh,
                     const std::vector<SphereIsometry>& group);
DiscreteJacobi surface_jacobi(const AssembledSurface& S);

struct OddBasis {
  Eigen::SparseMatrix<double> B;  // columns: projected vertex indicators
  size_t orbits = 0;
};
OddBasis odd_basis(const DiscreteJacobi& L);

struct JacobiSolveResult {
  Eigen::VectorXd u;
  bool annihilated = false;  // f had no odd component
  size_t odd_dim = 0;
  double min_abs_eig = 0, max_abs_eig = 0, condition = 0;
  std::string warning;
};

// Least-norm solve of L u = P f on the odd subspace.
JacobiSolveResult jacobi_solve(const DiscreteJacobi& L, const Eigen::VectorXd& f,
                               double condition_limit = 1e12);

// <Delta_mesh X, nu> at every vertex.
Eigen::VectorXd discrete_mean_curvature(const SurfaceMesh& mesh);

struct PerturbResult {
  std::vector<double> sup_H;  // per iterate, starting with the initial surface
  Eigen::VectorXd u;
  bool success = false;
  double u_inf = 0, injectivity_bound = 0;
  std::string diagnostic;
};

// Newton iteration u <- u + solve(L, -P H[u]) on normal graphs exp_p(u nu).
PerturbResult perturb_to_minimal(const AssembledSurface& S, int max_iters = 10);

}  // namespace desing
