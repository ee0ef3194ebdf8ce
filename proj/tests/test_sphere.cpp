#include <doctest.h>

#include <cmath>
#include <random>

#include "desing/error.hpp"
#include "desing/sphere.hpp"

using namespace desing;

namespace {

Vec4 image(const SphereIsometry& g, const Vec4& p) { return g.apply(p); }

GreatCircle image(const SphereIsometry& g, const GreatCircle& C) {
  return GreatCircle{g.apply(C.e1), g.apply(C.e2)};
}

double max_diff(const SphereIsometry& a, const SphereIsometry& b) {
  return (a.matrix - b.matrix).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("sphere") {
  TEST_CASE("phi special sets") {
    for (double z = 0; z < 6.3; z += 0.3) {
      Vec4 p = phi(Vec3(0, 0, z));
      CHECK((p - c2_to_r4(std::polar(1.0, z), 0.0)).norm() < 1e-15);
    }
    Configuration W = build_configuration(2, Configuration::Kind::W);
    const CliffordTorus& T = W.tori[0];
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int n = 0; n < 50; ++n) CHECK(std::abs(T.offset(phi(Vec3(U(rng), 0, U(rng))))) < 1e-12);
    GreatCircle C0 = circle_Cdouble(0);
    for (double th = 0; th < 2 * kPi; th += 0.1) {
      Vec4 p = phi(Vec3(kPi / 4 * std::cos(th), kPi / 4 * std::sin(th), -th / 2));
      CHECK(C0.distance(p) < 1e-7);
      CHECK(std::abs(p.norm() - 1) < 1e-15);
    }
  }

  TEST_CASE("pullback metric") {
    Mat3 g = phi_pullback_metric_cyl(kPi / 4);
    CHECK(g(1, 1) == doctest::Approx(0.5));
    CHECK(g(1, 2) == doctest::Approx(0.5));
    CHECK(g(2, 2) == doctest::Approx(1.0));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    const double h = 1e-4;
    for (int n = 0; n < 100; ++n) {
      Vec3 p(U(rng), U(rng), 3 * U(rng));
      Eigen::Matrix<double, 4, 3> J;
      for (int c = 0; c < 3; ++c) {
        Vec3 e = Vec3::Unit(c) * h;
        J.col(c) = (phi(p + e) - phi(p - e)) / (2 * h);
      }
      Mat3 gram = J.transpose() * J;
      CHECK((gram - phi_pullback_metric(p)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((J - phi_jacobian(p)).cwiseAbs().maxCoeff() < 1e-7);
    }
    // cylindrical chart matches as well
    for (int n = 0; n < 20; ++n) {
      double r = 0.1 + std::abs(U(rng)), th = U(rng), z = U(rng);
      Eigen::Matrix<double, 4, 3> J;
      J.col(0) = (phi_cyl(r + h, th, z) - phi_cyl(r - h, th, z)) / (2 * h);
      J.col(1) = (phi_cyl(r, th + h, z) - phi_cyl(r, th - h, z)) / (2 * h);
      J.col(2) = (phi_cyl(r, th, z + h) - phi_cyl(r, th, z - h)) / (2 * h);
      CHECK(((J.transpose() * J) - phi_pullback_metric_cyl(r)).cwiseAbs().maxCoeff() < 1e-6);
    }
    double worst = 0;
    for (double r = 0.01; r < 0.3; r += 0.01) {
      Mat3 gE = Vec3(1, r * r, 1).asDiagonal();
      worst = std::max(worst, (phi_pullback_metric_cyl(r) - gE).norm() / (r * r));
    }
    CHECK(worst < 2.0);
  }

  TEST_CASE("rotations about circles") {
    GreatCircle Cs[] = {circle_C1(), circle_C2(), circle_C(0.3, 1.1), circle_Cprime(3, 2),
                        circle_Cdouble(0.7)};
    for (const auto& C : Cs) {
      auto R = rotation_about_circle(C, kPi);
      CHECK(max_diff(R.compose(R), SphereIsometry{}) < 1e-12);
      CHECK(rotation_about_circle(C, 0.4).orthogonality_defect() < 1e-12);
      CHECK(max_diff(rotation_about_circle(C, 2 * kPi), SphereIsometry{}) < 1e-12);
      for (double t = 0; t < 6; t += 0.7)
        CHECK((rotation_about_circle(C, 0.9).apply(C.at(t)) - C.at(t)).norm() < 1e-14);
      CHECK(C.perp().perp().same_set(C));
    }
    Vec4 p = c2_to_r4(cplx(0.6, 0.0), cplx(0.0, 0.8));
    CHECK((rotation_about_circle(circle_C1(), 0.5).apply(p) -
           c2_to_r4(cplx(0.6, 0), cplx(0, 0.8) * std::polar(1.0, 0.5)))
              .norm() < 1e-15);
    CHECK((rotation_about_circle(circle_C2(), 0.5).apply(p) -
           c2_to_r4(cplx(0.6, 0) * std::polar(1.0, 0.5), cplx(0, 0.8)))
              .norm() < 1e-15);
  }

  TEST_CASE("composition identities") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> U(-4, 4);
    std::uniform_int_distribution<int> J(-6, 6);
    auto R = [](const GreatCircle& C, double a) { return rotation_about_circle(C, a); };
    for (int n = 0; n < 50; ++n) {
      double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng);
      CHECK(max_diff(R(circle_C(a1, a2), kPi).compose(R(circle_C(b1, b2), kPi)),
                     R(circle_C1(), 2 * (a2 - b2)).compose(R(circle_C2(), 2 * (a1 - b1)))) < 1e-12);
      int k = 2 + n % 3, j = J(rng), l = J(rng);
      CHECK(max_diff(R(circle_Cprime(k, j), kPi).compose(R(circle_Cprime(k, l), kPi)),
                     R(circle_C1(), kPi / k * (j - l)).compose(R(circle_C2(), kPi / k * (l - j)))) <
            1e-12);
      CHECK(max_diff(R(circle_Cdouble(a1), kPi).compose(R(circle_Cdouble(b1), kPi)),
                     R(circle_C1(), a1 - b1).compose(R(circle_C2(), a1 - b1))) < 1e-12);
    }
    CHECK(max_diff(R(circle_C(0, 0), kPi).compose(R(circle_Cprime(2, 1), kPi)),
                   R(circle_Cdouble(0), kPi)) < 1e-12);
  }

  TEST_CASE("Clifford tori") {
    GreatCircle C = circle_C(0.2, 0.9);
    CliffordTorus T = clifford_torus_of(C);
    CliffordTorus Tp = clifford_torus_of(C.perp());
    for (double s = 0; s < 6.3; s += 0.37)
      for (double t = 0; t < 6.3; t += 0.41) {
        Vec4 p = T.sample(s, t);
        CHECK(C.distance(p) == doctest::Approx(kPi / 4).epsilon(1e-12));
        CHECK(C.perp().distance(p) == doctest::Approx(kPi / 4).epsilon(1e-12));
        CHECK(std::abs(Tp.offset(p)) < 1e-12);
      }
  }

  TEST_CASE("configurations") {
    Configuration W2 = build_configuration(2, Configuration::Kind::Wprime);
    CHECK(W2.intersection_circles.size() == 6);
    CHECK(W2.intersection_circles[0].multiplicity == 2);
    for (size_t i = 2; i < 6; ++i) CHECK(W2.intersection_circles[i].multiplicity == 2);
    for (int k = 2; k <= 4; ++k) {
      Configuration W = build_configuration(k, Configuration::Kind::Wprime);
      CHECK(W.intersection_circles[0].multiplicity == k);
      CHECK(W.intersection_circles[1].multiplicity == k);
      Vec4 p = c2_to_r4(1.0, 0.0);
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l) {
          double c = W.tori[j].normal(p).dot(W.tori[l].normal(p));
          CHECK(std::abs(c) == doctest::Approx(std::abs(std::cos((j - l) * kPi / k))).epsilon(1e-12));
        }
      for (int j = 1; j <= k; ++j) CHECK(circle_Cprime(k, j).perp().same_set(circle_Cprime(k, j + k)));
      // T_j meets T' along C'_j and C'_{j+k}
      for (int j = 1; j <= k; ++j) {
        CHECK(W.tori[j - 1].contains_circle(circle_Cprime(k, j)));
        CHECK(W.tori[j - 1].contains_circle(circle_Cprime(k, j + k)));
        CHECK(W.tori[k].contains_circle(circle_Cprime(k, j)));
      }
    }
  }

  TEST_CASE("tori through C1 and C2 meet only there") {
    Configuration W = build_configuration(3, Configuration::Kind::W);
    const double h = 2 * kPi / 400;
    for (int i = 0; i < 400; ++i)
      for (int j = 0; j < 400; ++j) {
        Vec4 p = W.tori[0].sample(i * h, j * h);
        if (std::abs(W.tori[1].offset(p)) < h * h) {
          double d = std::min(circle_C1().distance(p), circle_C2().distance(p));
          CHECK(d < 2 * h);
        }
      }
  }

  TEST_CASE("scaffoldings") {
    for (int k = 2; k <= 3; ++k)
      for (int m = 1; m <= 3; ++m) {
        Scaffolding S = build_scaffolding(k, m, Scaffolding::Kind::C);
        CHECK(S.circles.size() == size_t(k * k * m));
        Scaffolding Sp = build_scaffolding(k, m, Scaffolding::Kind::Cprime);
        CHECK(Sp.circles.size() == size_t(2 * k * k * m + 2 * k * m));
        Configuration W = build_configuration(k, Configuration::Kind::Wprime);
        for (const auto& C : Sp.circles) {
          bool on = false;
          for (const auto& T : W.tori) on = on || T.contains_circle(C, 1e-12);
          CHECK(on);
        }
        // C_{k,m} meets C1 at the 2km-th roots of unity, k circles each.
        for (int j = 0; j < 2 * k * m; ++j) {
          Vec4 p = c2_to_r4(std::polar(1.0, j * kPi / (k * m)), 0.0);
          int cnt = 0;
          for (const auto& C : S.circles) cnt += C.distance(p) < 1e-12;
          CHECK(cnt == k);
        }
        int hits = 0;
        for (const auto& C : S.circles)
          for (int t = 0; t < 4 * k * m; ++t) {
            Vec4 p = c2_to_r4(std::polar(1.0, t * kPi / (2 * k * m)), 0.0);
            hits += C.distance(p) < 1e-12;
          }
        CHECK(hits == 2 * k * m * k);
      }
  }

  TEST_CASE("symmetry groups") {
    CHECK(build_symmetry_group(2, 1, GroupKind::Gmin).size() == 4);
    for (int k = 2; k <= 3; ++k)
      for (int m = 1; m <= 2; ++m) {
        auto G = build_symmetry_group(k, m, GroupKind::G);
        CHECK(G.size() == size_t(2 * k * k * m));
        // The definition as the reflection group of the scaffold gives the same group.
        auto H = reflection_group(build_scaffolding(k, m, Scaffolding::Kind::C));
        CHECK(H.size() == G.size());
        for (const auto& h : H) {
          bool found = false;
          for (const auto& g : G)
            if (max_diff(g, h) < 1e-9) {
              found = true;
              CHECK(g.parity == h.parity);
            }
          CHECK(found);
        }
        // orbit-stabilizer on C_{0,0}
        std::vector<GreatCircle> orbit;
        size_t stab = 0;
        GreatCircle C0 = circle_C(0, 0);
        for (const auto& g : G) {
          GreatCircle D = image(g, C0);
          if (D.same_set(C0)) ++stab;
          bool seen = false;
          for (const auto& E : orbit) seen = seen || E.same_set(D);
          if (!seen) orbit.push_back(D);
        }
        CHECK(orbit.size() * stab == G.size());
        // elements permute the tori of W_k
        Configuration W = build_configuration(k, Configuration::Kind::W);
        for (const auto& g : G) {
          CHECK(g.orthogonality_defect() < 1e-12);
          for (const auto& T : W.tori) {
            int matches = 0;
            for (const auto& U : W.tori) {
              bool all = true;
              for (double s = 0; s < 6; s += 1.3)
                all = all && std::abs(U.offset(image(g, T.sample(s, 0.7 * s + 0.2)))) < 1e-12;
              matches += all;
            }
            CHECK(matches == 1);
          }
        }
        auto Gp = build_symmetry_group(k, m, GroupKind::Gprime);
        CHECK(Gp.size() == size_t(8 * k * k * m));
        auto G2 = build_symmetry_group(k, 2 * m, GroupKind::G);
        for (const auto& g : G2) {
          bool found = false;
          for (const auto& h : Gp) found = found || max_diff(g, h) < 1e-9;
          CHECK(found);
        }
      }
    CHECK_THROWS_AS(build_symmetry_group(3, 2, GroupKind::G, 10), Error);
  }

  TEST_CASE("intertwining") {
    IntertwineResiduals z = intertwine_check(0.0);
    CHECK(z.rotation == 0.0);
    CHECK(z.translation == 0.0);
    for (double c : {0.3, 1.7, -2.2}) {
      IntertwineResiduals r = intertwine_check(c);
      CHECK(r.rotation <= 1e-12);
      CHECK(r.x_rotation <= 1e-12);
      CHECK(r.translation <= 1e-12);
      for (double rr : {0.1, 0.5, 0.7}) CHECK(intertwine_check(c, rr).rotation <= 1e-12);
    }
  }
}
