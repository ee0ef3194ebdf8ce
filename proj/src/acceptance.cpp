#include "desing/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "desing/assembly.hpp"
#include "desing/curvature.hpp"
#include "desing/error.hpp"
#include "desing/spectral.hpp"
#include "desing/sphere.hpp"
#include "desing/tower.hpp"

namespace desing {

const std::vector<ClaimInfo>& claim_registry() {
  static const std::vector<ClaimInfo> claims = {
      {1, "surface.genus_matrix", "initial surfaces: genus formulas for M and N", true},
      {2, "tower.minimality", "Karcher-Scherk tower: Weierstrass representation is minimal", true},
      {3, "tower.wing_decay", "tower wings: exponential decay of the wing graph", true},
      {4, "sphere.pullback_metric", "Phi: pullback of the round metric", true},
      {5, "sphere.symmetry_suite", "symmetry groups of the scaffolding and their identities", true},
      {6, "curvature.clifford_constants", "Clifford torus: H = 0, |A|^2 = 2, Jacobi operator Delta + 4", true},
      {7, "spectral.hemisphere_counts", "hemisphere lemma: Dirichlet and Neumann counts", true},
      {8, "spectral.strip_solver", "Poisson problem on the flat strip: decay and uniform bound", true},
      {9, "spectral.flat_torus_kernel", "flat torus: Delta + 4 has no odd kernel", true},
      {10, "curvature.mean_curvature_scaling", "standard towers: mean curvature bound in m", true},
      {11, "curvature.jacobi_round_trip", "linearized operator on odd functions is invertible", true},
      {12, "curvature.perturbation", "plumbing", false},
  };
  return claims;
}

namespace {

using Spec = InitialSurfaceSpec;

VerificationReport row(int index) {
  const ClaimInfo& c = claim_registry().at(index - 1);
  VerificationReport r;
  r.claim = c.id;
  r.anchor = c.anchor;
  r.gating = c.gating;
  return r;
}

AssembledSurface build(const Spec& s, int res) {
  AssemblyOptions o;
  o.resolution = res;
  return assemble(s, o);
}

// ---- 1 ----
void genus_matrix(VerificationReport& r, const AcceptanceOptions& opt) {
  const std::vector<std::pair<Spec, int>> table = {
      {Spec::M(2, 1, 1, 1, 0), 5},         {Spec::M(2, 2, 1, 1, 0), 9},
      {Spec::M(3, 1, 1, 1, 0), 13},        {Spec::M(3, 2, 1, 2, 0), 37},
      {Spec::M(2, 1, 1, 2, 1), 7},         {Spec::N(2, 1, 1, 1, 1, 0, 0), 25},
      {Spec::N(2, 1, 2, 1, 1, 0, 0), 33},  {Spec::N(3, 1, 1, 1, 1, 0, 0), 68},
  };
  // Listed values are the reference table; the formula governs where they disagree.
  std::ostringstream m, e, note;
  bool ok = true;
  for (const auto& [spec, listed] : table) {
    AssembledSurface S = build(spec, opt.resolution);
    const int g = genus(S.mesh), chi = euler_characteristic(S.mesh);
    const int formula = spec.expected_genus();
    const bool pass = g == formula && chi == 2 - 2 * formula;
    if (listed != formula) note << "; table lists " << spec.label() << "=" << listed << ", formula gives " << formula;
    ok = ok && pass;
    m << spec.label() << "=" << g << (pass ? " " : "! ");
    e << spec.label() << "=" << formula << " ";
  }
  r.pass = ok;
  r.measured = m.str() + note.str();
  r.expected = e.str() + "(chi = 2 - 2g)";
}

// ---- 2 ----
void tower_minimality(VerificationReport& r, const AcceptanceOptions& opt) {
  double worst = 0, worst_fd = 0;
  size_t n = 0;
  for (int k : {2, 3, 4}) {
    TowerChart ch(k);
    TowerPatch P = build_tower_patch(k, true, opt.tower_resolution, opt.tower_resolution / 2);
    for (size_t i = 0; i < P.w.size(); ++i) {
      const cplx xi = ch.xi_of_w(P.w[i]);
      FundamentalForms F = forms_from_jet(lift(ch.normalized_jet(xi)), Ambient::euclidean);
      const double A = std::sqrt(F.normSqA);
      if (!(A > 0)) continue;
      worst = std::max(worst, std::abs(F.H) / A);
      ++n;
      // Finite-difference cross-check on a sparse subset, floored at unit curvature.
      if (i % 97 == 0) {
        Chart4 f = [&](double u, double v) {
          Vec3 p = ch.normalized(cplx(u, v));
          return Vec4(p[0], p[1], p[2], 0.0);
        };
        FundamentalForms G = forms_at(f, xi.real(), xi.imag(), Ambient::euclidean);
        worst_fd = std::max(worst_fd, std::abs(G.H) / std::max(1.0, A));
      }
    }
  }
  r.pass = worst <= 1e-6 && worst_fd <= 1e-4 && n > 0;
  r.measured = "sup |H|/|A| = " + fmt(worst, 3) + " over " + std::to_string(n) +
               " samples; finite differences " + fmt(worst_fd, 3);
  r.expected = "<= 1e-06 (finite differences <= 1e-04)";
}

// ---- 3 ----
void wing_decay(VerificationReport& r, const AcceptanceOptions&) {
  std::ostringstream m;
  bool ok = true;
  for (int k : {2, 3}) {
    const double s0 = wing_onset_radius(k);
    const double slope = wing_decay_fit(k, s0, s0 + 5);
    ok = ok && slope >= -1.2 * k && slope <= -0.8 * k && slope <= -1;
    m << "k=" << k << ": " << fmt(slope, 5) << " ";
  }
  r.pass = ok;
  r.measured = m.str();
  r.expected = "slope in [-1.2k, -0.8k] and <= -1";
}

// ---- 4 ----
void pullback(VerificationReport& r, const AcceptanceOptions& opt) {
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> U(-1.2, 1.2);
  const double h = 1e-4;
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    Vec3 p(U(rng), U(rng), 3 * U(rng));
    Eigen::Matrix<double, 4, 3> J;
    for (int c = 0; c < 3; ++c) {
      Vec3 e = Vec3::Unit(c) * h;
      J.col(c) = (phi(p + e) - phi(p - e)) / (2 * h);
    }
    worst = std::max(worst, (J.transpose() * J - phi_pullback_metric(p)).cwiseAbs().maxCoeff());
  }
  r.pass = worst <= 1e-6;
  r.measured = "max Gram deviation " + fmt(worst, 3) + " at 100 points";
  r.expected = "<= 1e-06";
}

// ---- 5 ----
void symmetry_suite(VerificationReport& r, const AcceptanceOptions& opt) {
  std::ostringstream m;
  bool ok = true;
  for (const Spec& sp : {Spec::M(2, 1, 1, 1, 0), Spec::M(2, 1, 1, 2, 1), Spec::N(2, 1, 1, 1, 1, 0, 0)}) {
    AssembledSurface S = build(sp, opt.resolution);
    const double res = symmetry_invariance(S.mesh, surface_group(sp));
    ok = ok && res <= 2 * S.h();
    m << sp.label() << ": " << fmt(res / S.h(), 3) << "h ";
  }
  const size_t gmin = build_symmetry_group(2, 1, GroupKind::Gmin).size();
  ok = ok && gmin == 4;
  std::mt19937 rng(opt.seed + 1);
  std::uniform_real_distribution<double> C(-3, 3), R(0.05, 1.5);
  double worst = 0;
  for (int n = 0; n < 20; ++n) {
    IntertwineResiduals t = intertwine_check(C(rng), R(rng));
    worst = std::max({worst, t.rotation, t.x_rotation, t.translation});
  }
  ok = ok && worst <= 1e-12;
  r.pass = ok;
  r.measured = m.str() + "|Gmin| = " + std::to_string(gmin) + ", identities " + fmt(worst, 3);
  r.expected = "<= 2h, |Gmin| = 4, identities <= 1e-12";
}

// ---- 6 ----
void clifford(VerificationReport& r, const AcceptanceOptions&) {
  ToralReport T = clifford_control_report(32);
  CliffordTorus C = clifford_torus_of(circle_C1());
  SurfaceMesh M = periodic_grid_mesh(48, 48, [&](double s, double t) { return C.sample(s, t); });
  const int V = int(M.vertices.size());
  DiscreteJacobi L = build_jacobi(M, Eigen::VectorXd::Constant(V, 2.0));
  Eigen::VectorXd one = Eigen::VectorXd::Ones(V);
  const double lc = (L.apply(one) - 4 * one).cwiseAbs().maxCoeff();
  r.pass = T.sup_H_weighted <= 1e-6 && T.deep_deviation <= 1e-6 && lc <= 1e-10;
  r.measured = "|H| " + fmt(T.sup_H_weighted, 3) + ", ||A|^2 - 2| " + fmt(T.deep_deviation, 3) +
               ", |L1 - 4| " + fmt(lc, 3);
  r.expected = "<= 1e-06, <= 1e-06, <= 1e-10";
}

// ---- 7 ----
void hemisphere(VerificationReport& r, const AcceptanceOptions&) {
  bool ok = true;
  auto expected = [](const HemisphereCounts& H) {
    return H.dirichlet.nullity == 1 && H.dirichlet.negatives == 0 && H.neumann.nullity == 0 &&
           H.neumann.negatives == 1;
  };
  int cases = 0;
  for (int k : {2, 3, 4})
    for (double eps : {1e-2, 1e-3}) {
      HemisphereCounts A = hemisphere_counts(k, eps), B = hemisphere_counts(k, eps / 2);
      ok = ok && expected(A) && expected(B);
      ++cases;
    }
  double gap = 0;
  for (int k : {2, 3, 4}) gap = std::max(gap, std::abs(neumann_negative_root(k, std::exp(-20.0)).lambda - (k - 1)));
  ok = ok && gap <= 1e-3;
  r.pass = ok;
  r.measured = std::string(ok ? "D(1,0) N(0,1)" : "mismatch") + " in " + std::to_string(cases) +
               " cases and halves; |lambda* - (k-1)| = " + fmt(gap, 3);
  r.expected = "D(1,0) N(0,1) stable; <= 1e-03";
}

// ---- 8 ----
void strip(VerificationReport& r, const AcceptanceOptions&) {
  StripProblem P;
  P.X = 4, P.Y = 0.5;
  const double A = 0.4 * P.X * kPi, B = 0.6 * P.X * kPi, Y = P.Y;
  P.f = [=](double x, double y) {
    if (x <= A || x >= B) return 0.0;
    const double t = (x - A) * (B - x) / ((B - A) * (B - A));
    return std::exp(-0.25 / t) * (std::sin(y / Y) + 0.3 * std::sin(3 * y / Y));
  };
  StripSolution G = strip_solve(P), F = strip_solve_fd(P);
  const double agree = (G.u - F.u).cwiseAbs().maxCoeff() / F.sup();
  const double rate = strip_decay_rate(G, 1.0, A - 1.0);
  std::vector<double> C;
  for (double X : {4.0, 8.0, 16.0}) {
    StripProblem Q;
    Q.X = X, Q.Y = 0.5, Q.nx = int(100 * X);
    Q.f = [](double, double y) { return std::sin(y / 0.5); };
    C.push_back(strip_solve(Q).sup());
  }
  const double drift = std::max(std::abs(C[1] / C[0] - 1), std::abs(C[2] / C[1] - 1));
  r.pass = agree <= 1e-3 && rate >= 1 / P.Y - 0.1 && drift <= 0.1;
  r.measured = "oracle " + fmt(agree, 3) + ", rate " + fmt(rate, 4) + ", bound drift " + fmt(drift, 3);
  r.expected = "<= 1e-03, >= 1.9, <= 0.1";
}

// ---- 9 ----
void flat_torus(VerificationReport& r, const AcceptanceOptions&) {
  FlatTorusReport R = flat_torus_kernel_report(100);
  bool ok = R.kernel_residual <= 1e-12 && R.lists.size() == 4;
  for (const auto& L : R.lists) ok = ok && !L.contains_four;
  r.pass = ok;
  r.measured = "residual " + fmt(R.kernel_residual, 3) + ", 4 absent from " +
               std::to_string(R.lists.size()) + " lists";
  r.expected = "<= 1e-12, absent from 4 lists up to 100";
}

// ---- 10 ----
void scaling(VerificationReport& r, const AcceptanceOptions& opt) {
  ScalingFit f = mean_curvature_scaling(2, 1, 1, 0, opt.scaling_ms, 32);
  std::ostringstream m;
  m << "p = " << fmt(f.exponent, 4) << " (sup|H|:";
  for (size_t i = 0; i < f.m.size(); ++i) m << " m=" << f.m[i] << " " << fmt(f.supH[i], 3);
  m << ")";
  r.pass = f.exponent <= 0.6;
  r.measured = m.str();
  r.expected = "p <= 0.6";
}

// ---- 11 ----
void round_trip(VerificationReport& r, const AcceptanceOptions& opt) {
  AssembledSurface S = build(Spec::M(2, 4, 1, 1, 0), 16);
  DiscreteJacobi L = surface_jacobi(S);
  std::mt19937 rng(opt.seed + 2);
  std::uniform_real_distribution<double> U(-1, 1);
  Eigen::VectorXd v(L.mass.size());
  for (auto& x : v) x = U(rng);
  Eigen::VectorXd u = L.project_odd(v);
  JacobiSolveResult R = jacobi_solve(L, L.apply(u));
  const double err = (R.u - u).cwiseAbs().maxCoeff() / u.cwiseAbs().maxCoeff();
  r.pass = err <= 1e-6 && R.odd_dim > 0 && !R.annihilated;
  r.measured = "relative error " + fmt(err, 3) + ", odd dim " + std::to_string(R.odd_dim) +
               ", condition " + fmt(R.condition, 3);
  r.expected = "<= 1e-06, nonsingular";
}

// ---- 12 ----
void perturbation(VerificationReport& r, const AcceptanceOptions& opt) {
  AssembledSurface S = build(Spec::M(2, 8, 1, 1, 0), opt.perturb_resolution);
  PerturbResult P = perturb_to_minimal(S, opt.perturb_iters);
  r.pass = P.success;
  r.measured = "sup|H| " + fmt(P.sup_H.front(), 4) + " -> " + fmt(P.sup_H.back(), 4) + " in " +
               std::to_string(P.sup_H.size() - 1) + " steps";
  if (!P.diagnostic.empty()) r.measured += "; " + P.diagnostic;
  r.expected = "reduction >= 5x within " + std::to_string(opt.perturb_iters) + " steps";
}

}  // namespace

VerificationReport run_criterion(int index, const AcceptanceOptions& opt) {
  using Fn = void (*)(VerificationReport&, const AcceptanceOptions&);
  static const Fn fns[] = {genus_matrix, tower_minimality, wing_decay, pullback,
                           symmetry_suite, clifford, hemisphere, strip,
                           flat_torus, scaling, round_trip, perturbation};
  if (index < 1 || index > 12) throw Error(Errc::invalid_argument, "criterion index must be in 1..12");
  VerificationReport r = row(index);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fns[index - 1](r, opt);
  } catch (const Error& e) {
    r.pass = false;
    r.measured = std::string("error ") + errc_name(e.code()) + ": " + e.what();
    if (r.expected.empty()) r.expected = "no error";
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<VerificationReport> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<VerificationReport> rows;
  for (int i = 1; i <= 12; ++i) rows.push_back(run_criterion(i, opt));
  return rows;
}

int acceptance_exit_code(const std::vector<VerificationReport>& rows) {
  for (const auto& r : rows)
    if (r.gating && !r.pass) return 1;
  return 0;
}

}  // namespace desing
