#include "desing/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "desing/error.hpp"

namespace desing {

// ------------------------------------------------------------------ forms

Jet4 fd_jet(const Chart4& f, double u, double v, double scale) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double h1 = std::cbrt(eps) * scale, h2 = std::pow(eps, 0.25) * scale;
  Jet4 J;
  J.p = f(u, v);
  J.pu = (f(u + h1, v) - f(u - h1, v)) / (2 * h1);
  J.pv = (f(u, v + h1) - f(u, v - h1)) / (2 * h1);
  J.puu = (f(u + h2, v) - 2 * J.p + f(u - h2, v)) / (h2 * h2);
  J.pvv = (f(u, v + h2) - 2 * J.p + f(u, v - h2)) / (h2 * h2);
  J.puv = (f(u + h2, v + h2) - f(u + h2, v - h2) - f(u - h2, v + h2) + f(u - h2, v - h2)) /
          (4 * h2 * h2);
  return J;
}

Jet4 lift(const Jet3& J) {
  auto L = [](const Vec3& x) { return Vec4(x[0], x[1], x[2], 0.0); };
  return {L(J.p), L(J.pu), L(J.pv), L(J.puu), L(J.puv), L(J.pvv)};
}

FundamentalForms forms_from_jet(const Jet4& J, Ambient amb, const Vec4& hint) {
  FundamentalForms F;
  F.g << J.pu.dot(J.pu), J.pu.dot(J.pv), J.pu.dot(J.pv), J.pv.dot(J.pv);
  const double det = F.g.determinant(), tr = F.g.trace();
  if (!(det > 1e-24 * tr * tr) || !std::isfinite(det))
    throw Error(Errc::degenerate_parametrization, "first fundamental form is near singular");
  const Vec4 base = amb == Ambient::sphere ? J.p : Vec4(0, 0, 0, 1);
  Vec4 n = cross4(base, J.pu, J.pv);
  n.normalize();
  if (hint.squaredNorm() > 0 && n.dot(hint) < 0) n = -n;
  F.normal = n;
  F.A << J.puu.dot(n), J.puv.dot(n), J.puv.dot(n), J.pvv.dot(n);
  Mat2 S = F.g.inverse() * F.A;
  F.H = S.trace();
  F.normSqA = (S * S).trace();
  return F;
}

FundamentalForms forms_at(const Chart4& f, double u, double v, Ambient amb, const Vec4& hint,
                          double scale) {
  Jet4 J1 = fd_jet(f, u, v, scale), J2 = fd_jet(f, u, v, 0.5 * scale);
  FundamentalForms F1 = forms_from_jet(J1, amb, hint), F2 = forms_from_jet(J2, amb, hint);
  const double ref = std::max(std::abs(F2.normSqA), 1e-8);
  if (std::abs(F1.normSqA - F2.normSqA) <= 0.1 * ref) return F2;
  Jet4 R = J2;
  R.puu = (4 * J2.puu - J1.puu) / 3;
  R.puv = (4 * J2.puv - J1.puv) / 3;
  R.pvv = (4 * J2.pvv - J1.pvv) / 3;
  return forms_from_jet(R, amb, hint);
}

// ------------------------------------------------------- surface charts

Chart4 piece_chart(const AssembledSurface& S, int tower, const TowerGroupElement& g) {
  const TowerPlacement T = S.towers.at(tower);
  auto ch = std::make_shared<TowerChart>(T.k_C);
  return [T, ch, g](double a, double b) { return tower_surface_point(T, *ch, g, cplx(a, b)); };
}

Chart4 vertex_chart(const AssembledSurface& S, int v) {
  const VertexOrigin o = S.origin.at(v);
  Chart4 base = piece_chart(S, o.tower, o.g);
  return [base, o](double a, double b) { return base(o.xi.real() + a, o.xi.imag() + b); };
}

FundamentalForms surface_forms(const AssembledSurface& S, int v) {
  return forms_at(vertex_chart(S, v), 0.0, 0.0, Ambient::sphere, S.mesh.normals[v]);
}

Eigen::VectorXd surface_normSqA(const AssembledSurface& S) {
  Eigen::VectorXd a(S.mesh.vertices.size());
  for (int v = 0; v < int(a.size()); ++v) a[v] = surface_forms(S, v).normSqA;
  return a;
}

namespace {

double sup_H_towers(const std::vector<TowerPlacement>& towers, int Q, int refine,
                    const AssembledSurface* S) {
  double sup = 0;
  for (int t = 0; t < int(towers.size()); ++t) {
    const TowerPlacement& T = towers[t];
    const int n_z = std::max(1, Q / T.m_C) * refine;
    PieceSamples P = fundamental_piece(T, n_z);
    auto ch = std::make_shared<TowerChart>(T.k_C);
    for (const TowerGroupElement& g : {TowerGroupElement{}, TowerGroupElement{-1, 1, 1, 0}}) {
      Chart4 f = [&T, ch, g](double a, double b) {
        return tower_surface_point(T, *ch, g, cplx(a, b));
      };
      for (const cplx& xi : P.xi)
        sup = std::max(sup, std::abs(forms_at(f, xi.real(), xi.imag(), Ambient::sphere).H));
    }
  }
  (void)S;
  return sup;
}

int lcm_of(const std::vector<TowerPlacement>& towers) {
  int L = 1;
  for (const auto& T : towers) L = std::lcm(L, T.m_C);
  return L;
}

}  // namespace

double sup_mean_curvature(const AssembledSurface& S, int refine) {
  return sup_H_towers(S.towers, S.lattice_Q, refine, &S);
}

ScalingFit mean_curvature_scaling(int k, int n1, int n2, int sigma, const std::vector<int>& ms,
                                  int resolution) {
  if (ms.size() < 2) throw Error(Errc::insufficient_m_range, "need at least two values of m");
  ScalingFit fit;
  for (int m : ms) {
    auto spec = InitialSurfaceSpec::M(k, m, n1, n2, sigma);
    auto towers = tower_placements(spec, {});
    const int Q = 4 * (resolution / 16) * lcm_of(towers);
    fit.m.push_back(m);
    fit.supH.push_back(sup_H_towers(towers, Q, 1, nullptr));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    double x = std::log(double(fit.m[i])), y = std::log(fit.supH[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

// ------------------------------------------------------------ estimates

namespace {

double region_b_eff(const AssembledSurface& S, const TowerPlacement& T) {
  return std::max(TowerChart(T.k_C).corner_x(), std::min(S.options.region_b, T.st.a));
}

}  // namespace

ToralReport verify_toral_estimates(const AssembledSurface& S) {
  ToralReport R;
  const double m = S.spec.m;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t nfit = 0;
  for (int v = 0; v < int(S.mesh.vertices.size()); ++v) {
    if (S.mesh.tags.empty() || S.mesh.tags[v].kind != RegionTag::Kind::torus) continue;
    const Vec4& p = S.mesh.vertices[v];
    double d = std::numeric_limits<double>::infinity();
    for (const auto& T : S.towers) d = std::min(d, T.axis.distance(p) - region_b_eff(S, T) / T.m_C);
    d = std::max(d, 0.0);
    FundamentalForms F = surface_forms(S, v);
    const double dev = std::abs(F.normSqA - 2.0);
    const double w = std::exp(m * d) / m;
    R.sup_A_weighted = std::max(R.sup_A_weighted, dev * w);
    R.sup_H_weighted = std::max(R.sup_H_weighted, std::abs(F.H) * w);
    if (d >= 2.0 / m) R.deep_deviation = std::max(R.deep_deviation, dev);
    if (dev > 1e-7) {
      sx += d, sy += std::log(dev), sxx += d * d, sxy += d * std::log(dev);
      ++nfit;
    }
    ++R.samples;
  }
  if (nfit >= 2) R.fitted_rate = -(nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
  return R;
}

ToralReport clifford_control_report(int n) {
  ToralReport R;
  CliffordTorus T = clifford_torus_of(circle_C1());
  Chart4 f = [&T](double s, double t) { return T.sample(s, t); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FundamentalForms F = forms_at(f, 2 * kPi * i / n, 2 * kPi * j / n, Ambient::sphere);
      R.deep_deviation = std::max(R.deep_deviation, std::abs(F.normSqA - 2.0));
      R.sup_A_weighted = R.deep_deviation;
      R.sup_H_weighted = std::max(R.sup_H_weighted, std::abs(F.H));
      ++R.samples;
    }
  return R;
}

TowerComparison tower_region_comparison(const AssembledSurface& S) {
  TowerComparison C;
  for (int t = 0; t < int(S.towers.size()); ++t) {
    const TowerPlacement& T = S.towers[t];
    TowerChart ch(T.k_C);
    PieceSamples P = fundamental_piece(T, std::max(1, S.lattice_Q / T.m_C));
    Chart4 f = piece_chart(S, t, TowerGroupElement{});
    for (const cplx& xi : P.xi) {
      if (ch.normalized(xi).x() >= T.st.a) continue;
      FundamentalForms E = forms_from_jet(lift(ch.normalized_jet(xi)), Ambient::euclidean);
      FundamentalForms F = forms_at(f, xi.real(), xi.imag(), Ambient::sphere);
      const double mc = T.m_C;
      C.metric = std::max(C.metric, (mc * mc * F.g - E.g).norm() / E.g.norm());
      C.curvature = std::max(C.curvature, std::abs(F.normSqA / (mc * mc) - E.normSqA) /
                                              std::max(1.0, E.normSqA));
    }
  }
  return C;
}

// ---------------------------------------------------------------- Jacobi

namespace {

void cotan_operator(const SurfaceMesh& mesh, Eigen::SparseMatrix<double>& W,
                    Eigen::VectorXd& mass) {
  const int V = int(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> trip;
  mass = Eigen::VectorXd::Zero(V);
  for (const auto& t : mesh.triangles) {
    const Vec4 P[3] = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    double cot[3];
    bool obtuse_at[3];
    double area = 0;
    for (int c = 0; c < 3; ++c) {
      Vec4 u = P[(c + 1) % 3] - P[c], w = P[(c + 2) % 3] - P[c];
      double d = u.dot(w), cr = std::sqrt(std::max(u.squaredNorm() * w.squaredNorm() - d * d, 0.0));
      cot[c] = d / std::max(cr, 1e-300);
      obtuse_at[c] = d < 0;
      area = 0.5 * cr;
    }
    for (int c = 0; c < 3; ++c) {
      // Edge opposite to corner c joins the other two.
      int i = t[(c + 1) % 3], j = t[(c + 2) % 3];
      double w = 0.5 * cot[c];
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
    }
    const bool obtuse = obtuse_at[0] || obtuse_at[1] || obtuse_at[2];
    for (int c = 0; c < 3; ++c) {
      if (!obtuse) {
        // Voronoi share: edges at c weighted by the cotangents of the opposite corners.
        double e1 = (P[(c + 1) % 3] - P[c]).squaredNorm(), e2 = (P[(c + 2) % 3] - P[c]).squaredNorm();
        mass[t[c]] += (e1 * cot[(c + 2) % 3] + e2 * cot[(c + 1) % 3]) / 8.0;
      } else {
        mass[t[c]] += obtuse_at[c] ? area / 2 : area / 4;
      }
    }
  }
  W.resize(V, V);
  W.setFromTriplets(trip.begin(), trip.end());
}

}  // namespace

Eigen::VectorXd DiscreteJacobi::laplacian(const Eigen::VectorXd& u) const {
  return -(W * u).cwiseQuotient(mass);
}

Eigen::VectorXd DiscreteJacobi::apply(const Eigen::VectorXd& u) const {
  return laplacian(u) + potential.cwiseProduct(u);
}

Eigen::VectorXd DiscreteJacobi::act(size_t g, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const auto& p = perms.at(g);
  for (int v = 0; v < int(u.size()); ++v) out[p[v]] = parity[g] * u[v];
  return out;
}

Eigen::VectorXd DiscreteJacobi::project_odd(const Eigen::VectorXd& u) const {
  if (perms.empty()) return u;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.size());
  for (size_t g = 0; g < perms.size(); ++g) acc += act(g, u);
  return acc / double(perms.size());
}

double DiscreteJacobi::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return (a.cwiseProduct(mass)).dot(b);
}

DiscreteJacobi build_jacobi(const SurfaceMesh& mesh, const Eigen::VectorXd& normSqA,
                            double ricci) {
  if (normSqA.size() != int(mesh.vertices.size()))
    throw Error(Errc::invalid_argument, "potential size does not match the mesh");
  DiscreteJacobi L;
  cotan_operator(mesh, L.W, L.mass);
  L.potential = normSqA.array() + ricci;
  return L;
}

void attach_symmetry(DiscreteJacobi& L, const SurfaceMesh& mesh,
                     const std::vector<SphereIsometry>& group) {
  L.perms.clear();
  L.parity.clear();
  for (const auto& g : group) {
    auto p = vertex_permutation(mesh, g);
    for (int x : p)
      if (x < 0) throw Error(Errc::equivariance_violation, "group element does not preserve the mesh");
    L.perms.push_back(std::move(p));
    L.parity.push_back(g.parity);
  }
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(L.potential.size());
  for (const auto& p : L.perms)
    for (int v = 0; v < int(p.size()); ++v) avg[v] += L.potential[p[v]];
  L.potential = avg / double(L.perms.size());
}

DiscreteJacobi surface_jacobi(const AssembledSurface& S) {
  DiscreteJacobi L = build_jacobi(S.mesh, surface_normSqA(S), 2.0);
  attach_symmetry(L, S.mesh, surface_group(S.spec));
  return L;
}

OddBasis odd_basis(const DiscreteJacobi& L) {
  const int V = int(L.mass.size());
  const double G = double(L.perms.size());
  std::vector<char> seen(V, 0);
  std::vector<Eigen::Triplet<double>> trip;
  OddBasis ob;
  int col = 0;
  std::map<int, double> coef;
  for (int v = 0; v < V; ++v) {
    if (seen[v]) continue;
    ++ob.orbits;
    coef.clear();
    for (size_t g = 0; g < L.perms.size(); ++g) {
      int w = L.perms[g][v];
      seen[w] = 1;
      coef[w] += L.parity[g] / G;
    }
    bool nonzero = false;
    for (const auto& [w, c] : coef) nonzero |= std::abs(c) > 1e-12;
    if (!nonzero) continue;
    for (const auto& [w, c] : coef)
      if (std::abs(c) > 1e-12) trip.emplace_back(w, col, c);
    ++col;
  }
  ob.B.resize(V, col);
  ob.B.setFromTriplets(trip.begin(), trip.end());
  return ob;
}

JacobiSolveResult jacobi_solve(const DiscreteJacobi& L, const Eigen::VectorXd& f,
                               double condition_limit) {
  JacobiSolveResult R;
  const int V = int(L.mass.size());
  R.u = Eigen::VectorXd::Zero(V);
  Eigen::VectorXd pf = L.project_odd(f);
  if (pf.norm() <= 1e-12 * std::max(1.0, f.norm())) {
    R.annihilated = true;
    R.warning = "forcing has no odd component; returning zero";
    return R;
  }
  OddBasis ob = odd_basis(L);
  const auto& B = ob.B;
  R.odd_dim = size_t(B.cols());
  Eigen::SparseMatrix<double> Mdiag(V, V);
  Mdiag.reserve(Eigen::VectorXi::Constant(V, 1));
  for (int v = 0; v < V; ++v) Mdiag.insert(v, v) = L.mass[v] * L.potential[v];
  Eigen::SparseMatrix<double> K = Eigen::SparseMatrix<double>(B.transpose()) * (Mdiag - L.W) * B;
  Eigen::VectorXd Mr = B.transpose() * L.mass.asDiagonal() * B * Eigen::VectorXd::Ones(B.cols());
  // Mr is diagonal because the columns have disjoint supports; recover it exactly.
  Eigen::VectorXd mr(B.cols());
  for (int c = 0; c < B.cols(); ++c) {
    double s = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, c); it; ++it)
      s += it.value() * it.value() * L.mass[it.row()];
    mr[c] = s;
  }
  (void)Mr;
  Eigen::VectorXd r = B.transpose() * pf.cwiseProduct(L.mass);
  Eigen::VectorXd D = mr.cwiseSqrt().cwiseInverse();

  if (B.cols() <= 6000) {
    Eigen::MatrixXd Kt = D.asDiagonal() * Eigen::MatrixXd(K) * D.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kt);
    const auto& lam = es.eigenvalues();
    R.max_abs_eig = lam.cwiseAbs().maxCoeff();
    R.min_abs_eig = lam.cwiseAbs().minCoeff();
    R.condition = R.max_abs_eig / std::max(R.min_abs_eig, 1e-300);
    if (R.condition > condition_limit)
      throw Error(Errc::near_singular_odd_subspace,
                  "odd-subspace condition estimate " + std::to_string(R.condition));
    Eigen::VectorXd y = es.eigenvectors().transpose() * D.cwiseProduct(r);
    for (int i = 0; i < y.size(); ++i)
      y[i] = std::abs(lam[i]) > 1e-14 * R.max_abs_eig ? y[i] / lam[i] : 0.0;
    Eigen::VectorXd c = D.cwiseProduct(es.eigenvectors() * y);
    R.u = B * c;
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
      throw Error(Errc::near_singular_odd_subspace, "sparse factorization failed");
    R.u = B * ldlt.solve(r);
    R.condition = std::numeric_limits<double>::quiet_NaN();
  }
  return R;
}

Eigen::VectorXd discrete_mean_curvature(const SurfaceMesh& mesh) {
  Eigen::SparseMatrix<double> W;
  Eigen::VectorXd mass;
  cotan_operator(mesh, W, mass);
  const int V = int(mesh.vertices.size());
  Eigen::MatrixXd X(V, 4);
  for (int v = 0; v < V; ++v) X.row(v) = mesh.vertices[v].transpose();
  Eigen::MatrixXd LX = -(W * X);
  Eigen::VectorXd H(V);
  for (int v = 0; v < V; ++v) H[v] = LX.row(v).dot(mesh.normals[v]) / mass[v];
  return H;
}

// --------------------------------------------------------------- perturb

PerturbResult perturb_to_minimal(const AssembledSurface& S, int max_iters) {
  PerturbResult R;
  DiscreteJacobi L = surface_jacobi(S);
  const int V = int(S.mesh.vertices.size());
  R.injectivity_bound = 1.0 / std::sqrt((L.potential.array() - 2.0).maxCoeff());
  R.u = Eigen::VectorXd::Zero(V);

  auto deform = [&](const Eigen::VectorXd& u) {
    SurfaceMesh M = S.mesh;
    for (int v = 0; v < V; ++v)
      M.vertices[v] = std::cos(u[v]) * S.mesh.vertices[v] + std::sin(u[v]) * S.mesh.normals[v];
    compute_vertex_normals(M);
    for (int v = 0; v < V; ++v)
      if (M.normals[v].dot(S.mesh.normals[v]) < 0) M.normals[v] = -M.normals[v];
    return M;
  };

  Eigen::VectorXd H = L.project_odd(discrete_mean_curvature(S.mesh));
  R.sup_H.push_back(H.cwiseAbs().maxCoeff());
  for (int it = 0; it < max_iters; ++it) {
    JacobiSolveResult sol = jacobi_solve(L, -H);
    double t = 1.0;
    bool accepted = false, fits = false;
    for (int halving = 0; halving <= 5 && !accepted; ++halving, t *= 0.5) {
      Eigen::VectorXd u = R.u + t * sol.u;
      // Steps leaving the tubular neighbourhood are halved like any other rejected step.
      if (u.cwiseAbs().maxCoeff() > R.injectivity_bound) continue;
      fits = true;
      Eigen::VectorXd Hn = L.project_odd(discrete_mean_curvature(deform(u)));
      const double s = Hn.cwiseAbs().maxCoeff();
      if (s < R.sup_H.back()) {
        R.u = u;
        H = Hn;
        R.sup_H.push_back(s);
        accepted = true;
      }
    }
    if (!fits)
      throw Error(Errc::graph_overlap, "normal graph exceeds the injectivity bound " +
                                           std::to_string(R.injectivity_bound));
    if (!accepted) {
      R.diagnostic = "no decrease after 5 step halvings at iteration " + std::to_string(it);
      break;
    }
  }
  R.u_inf = R.u.cwiseAbs().maxCoeff();
  R.success = R.sup_H.back() * 5.0 <= R.sup_H.front();
  if (R.diagnostic.empty())
    R.diagnostic = R.success ? "sup|H| reduced at least fivefold" : "reduction below fivefold";
  return R;
}

}  // namespace desing
