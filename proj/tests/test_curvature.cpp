#include <doctest.h>

#include <map>
#include <random>

#include "desing/curvature.hpp"
#include "desing/error.hpp"

using namespace desing;

namespace {

const AssembledSurface& cached(const InitialSurfaceSpec& s, int res = 16) {
  static std::map<std::pair<std::string, int>, AssembledSurface> cache;
  auto key = std::make_pair(s.label(), res);
  auto it = cache.find(key);
  if (it == cache.end()) {
    AssemblyOptions o;
    o.resolution = res;
    it = cache.emplace(key, assemble(s, o)).first;
  }
  return it->second;
}

const DiscreteJacobi& cached_jacobi(const InitialSurfaceSpec& s) {
  static std::map<std::string, DiscreteJacobi> cache;
  auto it = cache.find(s.label());
  if (it == cache.end()) it = cache.emplace(s.label(), surface_jacobi(cached(s))).first;
  return it->second;
}

SurfaceMesh clifford_mesh(int n) {
  CliffordTorus T = clifford_torus_of(circle_C1());
  return periodic_grid_mesh(n, n, [&](double s, double t) { return T.sample(s, t); });
}

// Latitude sphere x4 = sin r0: umbilic with principal curvatures tan r0.
Chart4 latitude_sphere(double r0) {
  return [r0](double u, double v) {
    return Vec4(std::cos(r0) * std::cos(u) * std::cos(v), std::cos(r0) * std::cos(u) * std::sin(v),
                std::cos(r0) * std::sin(u), std::sin(r0));
  };
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("Clifford torus constants") {
    ToralReport R = clifford_control_report(16);
    CHECK(R.sup_H_weighted < 1e-6);
    CHECK(R.deep_deviation < 1e-6);
  }

  TEST_CASE("great sphere is totally geodesic") {
    FundamentalForms F = forms_at(latitude_sphere(0.0), 0.3, 1.1, Ambient::sphere);
    CHECK(F.A.norm() < 1e-6);
    CHECK(std::abs(F.H) < 1e-6);
  }

  TEST_CASE("normal flip flips H") {
    const double r0 = 0.4;
    Chart4 f = latitude_sphere(r0);
    FundamentalForms F = forms_at(f, 0.2, 0.7, Ambient::sphere);
    FundamentalForms G = forms_at(f, 0.2, 0.7, Ambient::sphere, -F.normal);
    CHECK(std::abs(std::abs(F.H) - 2 * std::tan(r0)) < 1e-6);
    CHECK(std::abs(F.H + G.H) < 1e-12);
    CHECK(std::abs(F.normSqA - 2 * std::pow(std::tan(r0), 2)) < 1e-6);
  }

  TEST_CASE("analytic tower jets are minimal") {
    for (int k : {2, 3, 4}) {
      TowerChart ch(k);
      for (cplx xi : {cplx(0.3, -0.2), cplx(1.0, -0.7), cplx(0.05, -0.9)}) {
        FundamentalForms F = forms_from_jet(lift(ch.normalized_jet(xi)), Ambient::euclidean);
        CHECK(std::abs(F.H) <= 1e-6 * std::max(1.0, std::sqrt(F.normSqA)));
      }
    }
  }

  TEST_CASE("first variation of area") {
    // d/dt area(cos(t) p + sin(t) nu) = -int H dA for the latitude sphere, closed form.
    const double r0 = 0.3;
    Chart4 f = latitude_sphere(r0);
    FundamentalForms F = forms_at(f, 0.0, 0.0, Ambient::sphere);
    auto area = [&](double t) {
      // Moving along nu changes the latitude to r0 -+ t.
      double r = r0 + (F.normal[3] > 0 ? t : -t);
      return 4 * kPi * std::pow(std::cos(r), 2);
    };
    const double dt = 1e-5;
    const double dA = (area(dt) - area(-dt)) / (2 * dt);
    CHECK(dA == doctest::Approx(-F.H * area(0.0)).epsilon(1e-6));
  }

  TEST_CASE("discrete Jacobi on the Clifford torus") {
    SurfaceMesh M = clifford_mesh(48);
    const int V = int(M.vertices.size());
    DiscreteJacobi L = build_jacobi(M, Eigen::VectorXd::Constant(V, 2.0));
    Eigen::VectorXd one = Eigen::VectorXd::Ones(V);
    CHECK((L.apply(one) - 4 * one).cwiseAbs().maxCoeff() < 1e-10);

    // sin s sin t lies in the kernel of Delta + 4.
    CliffordTorus T = clifford_torus_of(circle_C1());
    Eigen::VectorXd u(V);
    for (int i = 0; i < 48; ++i)
      for (int j = 0; j < 48; ++j) {
        double s = 2 * kPi * i / 48, t = 2 * kPi * j / 48;
        int best = 0;
        double bd = 1e9;
        Vec4 q = T.sample(s, t);
        for (int v = 0; v < V; ++v)
          if ((M.vertices[v] - q).norm() < bd) bd = (M.vertices[v] - q).norm(), best = v;
        u[best] = std::sin(s) * std::sin(t);
      }
    CHECK(L.apply(u).cwiseAbs().maxCoeff() < 5e-3);

    Eigen::VectorXd a = random_vector(V, 1), b = random_vector(V, 2);
    CHECK(std::abs(L.inner(L.apply(a), b) - L.inner(a, L.apply(b))) < 1e-9 * L.inner(a, a));

    // Exact torus has vanishing discrete mean curvature up to discretization.
    CHECK(discrete_mean_curvature(M).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("odd projector and equivariance") {
    auto spec = InitialSurfaceSpec::M(2, 1, 1, 1, 0);
    const DiscreteJacobi& L = cached_jacobi(spec);
    const int V = int(L.mass.size());
    Eigen::VectorXd u = random_vector(V, 7);
    Eigen::VectorXd pu = L.project_odd(u);
    CHECK((L.project_odd(pu) - pu).cwiseAbs().maxCoeff() < 1e-12);
    for (size_t g = 0; g < L.perms.size(); ++g)
      CHECK((L.apply(L.act(g, u)) - L.act(g, L.apply(u))).cwiseAbs().maxCoeff() <
            1e-8 * L.apply(u).cwiseAbs().maxCoeff());
  }

  TEST_CASE("odd solve round trip") {
    auto spec = InitialSurfaceSpec::M(2, 4, 1, 1, 0);
    const DiscreteJacobi& L = cached_jacobi(spec);
    Eigen::VectorXd u = L.project_odd(random_vector(int(L.mass.size()), 11));
    JacobiSolveResult R = jacobi_solve(L, L.apply(u));
    CHECK(R.odd_dim > 0);
    CHECK(R.condition < 1e12);
    CHECK((R.u - u).cwiseAbs().maxCoeff() <= 1e-6 * u.cwiseAbs().maxCoeff());
  }

  TEST_CASE("degenerate forcing") {
    auto spec = InitialSurfaceSpec::M(2, 1, 1, 1, 0);
    const DiscreteJacobi& L = cached_jacobi(spec);
    const int V = int(L.mass.size());
    JacobiSolveResult Z = jacobi_solve(L, Eigen::VectorXd::Zero(V));
    CHECK(Z.annihilated);
    CHECK(Z.u.norm() == 0.0);
    // Constants are even under side-exchanging elements, so the odd part vanishes.
    JacobiSolveResult C = jacobi_solve(L, Eigen::VectorXd::Ones(V));
    CHECK(C.annihilated);
    CHECK(!C.warning.empty());
    CHECK_THROWS_AS(jacobi_solve(L, random_vector(V, 3), 1.0), Error);
  }

  TEST_CASE("toral estimates") {
    const AssembledSurface& S = cached(InitialSurfaceSpec::M(2, 4, 1, 1, 0));
    ToralReport R = verify_toral_estimates(S);
    CHECK(R.samples > 0);
    CHECK(std::isfinite(R.sup_A_weighted));
    TowerComparison C = tower_region_comparison(S);
    CHECK(C.metric < 0.5);
  }

  TEST_CASE("mean curvature scaling") {
    ScalingFit f = mean_curvature_scaling(2, 1, 1, 0, {4, 8, 16});
    CHECK(f.exponent <= 0.6);
    CHECK_THROWS_AS(mean_curvature_scaling(2, 1, 1, 0, {4}), Error);
  }

  TEST_CASE("perturbation reduces mean curvature") {
    PerturbResult P = perturb_to_minimal(cached(InitialSurfaceSpec::M(2, 4, 1, 1, 0)), 4);
    CHECK(P.success);
    CHECK(P.sup_H.back() * 5 <= P.sup_H.front());
    CHECK(P.u_inf < P.injectivity_bound);
  }
}
