#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "desing/types.hpp"

namespace desing {

// ---- hemisphere operator L_cyl = (r d_r)^2 + V(r) + d_theta^2 ----

struct RadialMode {
  // kernel: the Dirichlet kernel (r^{2k-2} - 1) / (r^{2k-2} + 1), equal to u_0 / (1 - k).
  enum class Kind { u_lambda, kernel, u_0prime, u_kprime };
  int k = 2;
  int ell = 0;
  double lambda = 0;
  Kind kind = Kind::u_lambda;
};

// Closed forms; the primed kinds are defined on (0, 1] only.
double radial_eigenfunction(const RadialMode& mode, double r);
// Radial derivative, closed form.
double radial_eigenfunction_dr(const RadialMode& mode, double r);

// V = 8 (k-1)^2 r^{2k-2} / (r^{2k-2} + 1)^2
double cyl_potential(int k, double r);

struct FactorizationResiduals {
  double h = 0;               // step in s = ln r
  double kernel = 0;          // sup |((r d_r)^2 + V - l^2) u_|l||
  double factorization = 0;   // sup |A_- A_+ f + (k-1)^2 f - ((r d_r)^2 + V) f| over test functions
  double lowering = 0;        // sup |A_- r^lambda - u_lambda|
};
// Uniform grid in ln r on [r_min, r_max] with n points.
FactorizationResiduals factorization_check(int k, int ell, double r_min, double r_max, int n,
                                           unsigned seed = 1);

// lambda coth(lambda ln eps) - (k-1) tanh((k-1) ln eps)
double neumann_root_function(int k, double eps, double lambda);

struct NeumannRoot {
  double lambda = 0;
  double secant = 0;     // independent secant solve
  int sign_changes = 0;  // over (0, 10k]
};
NeumannRoot neumann_negative_root(int k, double eps);

struct BoundaryCounts {
  int nullity = 0;
  int negatives = 0;
};

struct ModeCount {
  int ell = 0;
  int multiplicity = 1;
  double phase_dirichlet = 0, phase_neumann = 0;  // Pruefer angle at r = 1, annulus start
  double regular_dirichlet = 0, regular_neumann = 0;  // boundary residuals, regular start
  int dirichlet_neg = 0, neumann_neg = 0;
  bool dirichlet_null = false, neumann_null = false;
};

struct HemisphereCounts {
  int k = 2;
  double eps = 1e-3;
  BoundaryCounts dirichlet, neumann;
  std::vector<ModeCount> modes;
  int neumann_negative_mode = -1;  // ell of the negative Neumann mode
  std::vector<std::string> warnings;
};

// Sturm counts for -L_cyl, modes ell in kZ with |ell| <= L_max (default 8k).
HemisphereCounts hemisphere_counts(int k, double eps = 1e-3, int L_max = 0);

// Residual of the radial ODE at weight mu: the Pruefer phase shot from r = eps with
// Dirichlet data, evaluated at r = 1 (cylinder weight).
double pruefer_phase(int k, int ell, double eps, double mu, bool eta_weight);

// ---- eta metric ----

struct EtaFactor {
  double conformal = 0;  // e^{2 phi}
  double potential = 0;  // e^{-2 phi} |A|^2
};
EtaFactor eta_factor(int k, cplx z);

// ---- strip Poisson problem on (0, X pi) x R ----

// Dirichlet Green's function of d^2/dx^2 - n^2 / Y^2 on [0, X pi], in log space.
double strip_green(int n, double X, double Y, double x, double xp);

struct StripProblem {
  double X = 4, Y = 0.5;
  std::function<double(double, double)> f;
  int modes = 32;
  int nx = 400;  // x samples
  int ny = 64;   // y samples on [0, Y pi]
};

struct StripSolution {
  Eigen::VectorXd x, y;
  Eigen::MatrixXd u;  // u(i, j) at (x_i, y_j)
  double sup() const { return u.cwiseAbs().maxCoeff(); }
};

// Throws equivariance-violation when f is not odd under both reflections.
StripSolution strip_solve(const StripProblem& P);
// Dense 5-point Dirichlet solve on the same grid: the oracle.
StripSolution strip_solve_fd(const StripProblem& P);

// Fitted rate of log sup_y |u(x, y)| on [x0, x1].
double strip_decay_rate(const StripSolution& S, double x0, double x1);

// ---- flat torus kernel of Delta + 4 ----

struct EigenList {
  std::string label;
  int a = 1, b = 1;  // a j1^2 + b j2^2
  bool from_zero = false;
  std::vector<int> values;  // sorted, up to the cutoff
  bool contains_four = false;
};

struct FlatTorusReport {
  double kernel_residual = 0;  // sup |(Delta + 4) f| over basis samples
  std::vector<EigenList> lists;
};
FlatTorusReport flat_torus_kernel_report(int cutoff = 100, int samples = 64);

}  // namespace desing
