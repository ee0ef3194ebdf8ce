#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "desing/error.hpp"
#include "desing/tower.hpp"

using namespace desing;

namespace {

// Independent oracle: integrate the Weierstrass 1-forms along the segment [0, w].
Vec3 quadrature_map(int k, cplx w) {
  using boost::math::quadrature::gauss_kronrod;
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    auto f = [&](double t) {
      cplx z = t * w;
      cplx den = 1.0 + std::pow(z, 2 * k);
      cplx phi;
      if (c == 0) phi = (1.0 - std::pow(z, 2 * k - 2)) / den;
      if (c == 1) phi = cplx(0, 1) * (1.0 + std::pow(z, 2 * k - 2)) / den;
      if (c == 2) phi = 2.0 * std::pow(z, k - 1) / den;
      return (phi * w).real();
    };
    out[c] = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
  }
  return out;
}

cplx random_sector_point(std::mt19937& rng, int k, double rmax = 0.95) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return std::polar(rmax * std::sqrt(U(rng)), (kPi / (2.0 * k)) * U(rng));
}

}  // namespace

TEST_SUITE("tower") {
  TEST_CASE("cutoff template properties") {
    CHECK(cutoff(0, 1, 0) == 0.0);
    CHECK(cutoff(0, 1, 1) == 1.0);
    CHECK(cutoff(0, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    for (double t = -1.0; t <= 2.0; t += 0.013)
      CHECK(cutoff(0, 1, t) + cutoff(1, 0, t) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = -1;
    for (double t = -0.5; t <= 1.5; t += 0.01) {
      double v = cutoff(0, 1, t);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK_THROWS_AS(cutoff(1, 1, 0.3), Error);
  }

  TEST_CASE("closed form agrees with quadrature of the Weierstrass data") {
    std::mt19937 rng(7);
    for (int k = 2; k <= 4; ++k)
      for (int n = 0; n < 20; ++n) {
        cplx w = random_sector_point(rng, k);
        Vec3 a = weierstrass_map(k, UnitDiscParameter::make(k, w)).position;
        Vec3 b = quadrature_map(k, w);
        CHECK((a - b).norm() < 1e-11);
      }
  }

  TEST_CASE("weierstrass map special values") {
    for (int k = 2; k <= 4; ++k) {
      Vec3 o = weierstrass_map(k, UnitDiscParameter::make(k, 0.0)).position;
      CHECK(o.norm() == 0.0);
    }
    TowerChart ch(2);
    for (double a = -kPi / 4 + 0.05; a < -0.05; a += 0.1) {
      cplx w = ch.omega(1) * std::polar(1.0, a);
      CHECK(weierstrass_map(2, UnitDiscParameter::make(2, w)).position.z() ==
            doctest::Approx(kPi / 4).epsilon(1e-12));
    }
    double prev = -1e9;
    for (double d = 1e-1; d > 1e-12; d *= 0.1) {
      cplx w = ch.omega(1) * (1.0 - d);
      double x = weierstrass_map(2, UnitDiscParameter::make(2, w)).position.x();
      CHECK(x > prev + 0.5);
      prev = x;
    }
    CHECK_THROWS_AS(weierstrass_map(2, UnitDiscParameter{ch.omega(1)}), Error);
    CHECK_THROWS_AS(UnitDiscParameter::make(2, 1.1), Error);
    CHECK_THROWS_AS(UnitDiscParameter::make(1, 0.1), Error);
  }

  TEST_CASE("sector maps into the wedge slab") {
    for (int k = 2; k <= 4; ++k) {
      TowerPatch P = build_tower_patch(k, false, 48, 24);
      for (const Vec3& p : P.points) {
        double th = std::atan2(p.y(), p.x());
        if (std::hypot(p.x(), p.y()) > 1e-12) {
          CHECK(th >= -kPi / (2 * k) - 1e-9);
          CHECK(th <= 1e-9);
        }
        CHECK(p.z() >= -1e-9);
        CHECK(p.z() <= kPi / (2 * k) + 1e-9);
      }
      TowerPatch N = build_tower_patch(k, true, 48, 24);
      for (const Vec3& p : N.points) {
        CHECK(p.z() >= -1e-9);
        CHECK(p.z() <= kPi / 2 + 1e-9);
      }
    }
  }

  TEST_CASE("differential matches finite differences") {
    std::mt19937 rng(3);
    for (int k = 2; k <= 4; ++k) {
      auto d0 = weierstrass_differential(k, UnitDiscParameter::make(k, 0.0));
      CHECK(std::abs(d0[2]) == 0.0);
      CHECK(std::abs(d0[0] - 1.0) == 0.0);
      for (int n = 0; n < 20; ++n) {
        cplx w = random_sector_point(rng, k, 0.9);
        auto d = weierstrass_differential(k, UnitDiscParameter::make(k, w));
        const double h = 1e-6;
        auto X = [&](cplx q) { return weierstrass_map(k, UnitDiscParameter::make(k, q)).position; };
        Vec3 du = (X(w + h) - X(w - h)) / (2 * h);
        Vec3 dv = (X(w + cplx(0, h)) - X(w - cplx(0, h))) / (2 * h);
        for (int c = 0; c < 3; ++c) {
          CHECK(du[c] == doctest::Approx(d[c].real()).epsilon(1e-7));
          CHECK(dv[c] == doctest::Approx(-d[c].imag()).epsilon(1e-7));
        }
      }
    }
  }

  TEST_CASE("chart jets match finite differences") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 2; k <= 4; ++k) {
      TowerChart ch(k);
      for (int n = 0; n < 10; ++n) {
        cplx xi(3.0 * U(rng), -kPi / 2 * U(rng));
        Jet3 J = ch.normalized_jet(xi);
        const double h = 1e-4;
        auto P = [&](double du, double dv) { return ch.normalized(xi + cplx(du, dv)); };
        CHECK((J.pu - (P(h, 0) - P(-h, 0)) / (2 * h)).norm() < 1e-6);
        CHECK((J.pv - (P(0, h) - P(0, -h)) / (2 * h)).norm() < 1e-6);
        CHECK((J.puu - (P(h, 0) - 2 * P(0, 0) + P(-h, 0)) / (h * h)).norm() < 1e-5);
        CHECK((J.pvv - (P(0, h) - 2 * P(0, 0) + P(0, -h)) / (h * h)).norm() < 1e-5);
        CHECK((J.puv - (P(h, h) - P(h, -h) - P(-h, h) + P(-h, -h)) / (4 * h * h)).norm() < 1e-5);
      }
    }
  }

  TEST_CASE("coordinates are harmonic in w") {
    std::mt19937 rng(5);
    for (int k = 2; k <= 3; ++k)
      for (int n = 0; n < 10; ++n) {
        cplx w = random_sector_point(rng, k, 0.8);
        auto X = [&](cplx q) { return weierstrass_map(k, UnitDiscParameter::make(k, q)).position; };
        auto lap = [&](double h) {
          return ((X(w + h) + X(w - h) + X(w + cplx(0, h)) + X(w - cplx(0, h)) - 4 * X(w)) / (h * h)).norm();
        };
        // second-order consistency: halving h quarters the residual
        double a = lap(1e-2), b = lap(5e-3);
        CHECK(a < 500 * 1e-4);
        CHECK(b / a == doctest::Approx(0.25).epsilon(0.05));
      }
  }

  TEST_CASE("metric density") {
    std::mt19937 rng(9);
    for (int k = 2; k <= 4; ++k) {
      for (int n = 0; n < 10; ++n) {
        cplx w = random_sector_point(rng, k, 0.9);
        auto a = tower_metric_density(k, UnitDiscParameter::make(k, w));
        auto b = tower_metric_density(k, UnitDiscParameter::make(k, std::conj(w)));
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
        // conformal factor equals |dX/du|^2
        auto d = weierstrass_differential(k, UnitDiscParameter::make(k, w));
        double g = 0.5 * (std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2]));
        CHECK(a == doctest::Approx(g).epsilon(1e-12));
      }
      cplx w = std::polar(1.0, 0.1);
      double expect = 4.0 / std::norm(std::pow(w, 2 * k) + 1.0);
      CHECK(tower_metric_density(k, UnitDiscParameter::make(k, w)) ==
            doctest::Approx(expect).epsilon(1e-13));
    }
    // Pulled-back area of a small disc versus the area of its triangulated image.
    const int k = 3;
    cplx c(0.3, 0.1);
    double rad = 0.05, pulled = 0.0, image = 0.0;
    const int nr = 200, nt = 400;
    auto X = [&](double r, double t) {
      return weierstrass_map(k, UnitDiscParameter::make(k, c + std::polar(r, t))).position;
    };
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        double r0 = rad * i / nr, r1 = rad * (i + 1) / nr;
        double t0 = 2 * kPi * j / nt, t1 = 2 * kPi * (j + 1) / nt;
        double rm = 0.5 * (r0 + r1), tm = 0.5 * (t0 + t1);
        pulled += tower_metric_density(k, UnitDiscParameter::make(k, c + std::polar(rm, tm))) *
                  rm * (r1 - r0) * (t1 - t0);
        Vec3 a = X(r0, t0), b = X(r1, t0), d = X(r1, t1), e = X(r0, t1);
        image += 0.5 * ((b - a).cross(d - a)).norm() + 0.5 * ((d - a).cross(e - a)).norm();
      }
    CHECK(pulled == doctest::Approx(image).epsilon(1e-4));
  }

  TEST_CASE("second fundamental form") {
    const int k = 2;
    std::vector<double> vals;
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        cplx w = std::polar(0.99 * (i + 0.5) / 100, (kPi / 4) * (j + 0.5) / 100);
        double a = second_form_tower(k, UnitDiscParameter::make(k, w), 1.0);
        double b = second_form_tower(k, UnitDiscParameter::make(k, w), std::polar(1.0, kPi / 4));
        vals.push_back(std::hypot(a, b));
      }
    std::vector<double> s = vals;
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    double med = s[s.size() / 2];
    for (double v : vals) CHECK(v > 1e-8 * med);
    for (int kk = 2; kk <= 4; ++kk) {
      TowerChart ch(kk);
      for (double t = 0.05; t < 0.99; t += 0.1) {
        cplx w = t * ch.omega(1);
        CHECK(std::abs(second_form_tower(kk, UnitDiscParameter::make(kk, w), ch.omega(1))) < 1e-13);
      }
      cplx w(0.3, 0.2), V(0.7, -0.4);
      CHECK(second_form_tower(kk, UnitDiscParameter::make(kk, w), cplx(0, 1) * V) ==
            doctest::Approx(-second_form_tower(kk, UnitDiscParameter::make(kk, w), V)).epsilon(1e-14));
    }
  }

  TEST_CASE("wing constant has the closed form") {
    CHECK(TowerChart(2).wing_constant() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    for (int k = 2; k <= 4; ++k) {
      TowerChart ch(k);
      cplx xi(40.0, -0.3);
      double lim = ch.normalized(xi).x() - xi.real();
      CHECK(lim == doctest::Approx(ch.wing_constant()).epsilon(1e-12));
    }
  }

  TEST_CASE("wing inversion round trip and symmetry") {
    for (int k = 2; k <= 4; ++k) {
      double R = wing_onset_radius(k);
      CHECK(R > 0);
      CHECK(R >= TowerChart(k).corner_x() / k - 1e-12);
      for (double s = R; s < R + 5; s += 0.37)
        for (double z = -3.0; z < 3.0; z += 0.29) {
          WingSolution sol = wing_solve(k, s, z);
          TowerChart ch(k);
          Vec3 p = ch.normalized(sol.xi);
          CHECK(p.x() / k == doctest::Approx(s).epsilon(1e-10));
          CHECK(std::abs(wing_height(k, s, -z) + sol.t) < 1e-12);
        }
      for (double s = R; s < R + 5; s += 0.5) CHECK(wing_height(k, s, 0.0) == 0.0);
    }
  }

  TEST_CASE("wing decay rate") {
    double s2 = wing_decay_fit(2, wing_onset_radius(2), wing_onset_radius(2) + 5);
    CHECK(s2 >= -2.4);
    CHECK(s2 <= -1.6);
    double s3 = wing_decay_fit(3, wing_onset_radius(3), wing_onset_radius(3) + 5);
    CHECK(s3 >= -3.5);
    CHECK(s3 <= -2.5);
    CHECK_THROWS_AS(wing_decay_fit(2, 1.0, 2.0, 2), Error);
  }

  TEST_CASE("tower group and parity") {
    for (int k = 2; k <= 4; ++k) {
      CHECK(tower_group(k, 2).size() == size_t(8 * k));
      CHECK(tower_parity(k, {-1, 0, -1, 0}) == -1);
      CHECK(tower_parity(k, {1, 0, -1, 1}) == 1);
      CHECK(tower_parity(k, {-1, 1, 1, 0}) == 1);
      auto G = tower_group(k, 4);
      for (auto& a : G)
        for (auto& b : G) {
          auto c = tower_compose(a, b);
          CHECK(in_tower_group(c));
          CHECK(tower_parity(k, c) == tower_parity(k, a) * tower_parity(k, b));
          Vec3 p(0.3, -0.7, 0.45);
          CHECK((tower_act(k, c, p) - tower_act(k, a, tower_act(k, b, p))).norm() < 1e-12);
        }
    }
  }

  TEST_CASE("sampled tower is invariant under its generators") {
    for (int k = 2; k <= 3; ++k) {
      TowerPatch P = build_tower_patch(k, true, 24, 12);
      std::vector<Vec3> cloud;
      for (auto& g : tower_group(k, 6))
        for (auto& p : P.points) {
          Vec3 q = tower_act(k, g, p);
          q.z() -= 2 * kPi;
          if (q.norm() < 6.0) cloud.push_back(q);
        }
      auto dist = [&](const Vec3& q) {
        double d = 1e9;
        for (auto& c : cloud) d = std::min(d, (c - q).norm());
        return d;
      };
      double hmax = 0.2;
      for (auto& e : P.generators) {
        double worst = 0;
        for (size_t n = 0; n < cloud.size(); n += 7) {
          Vec3 q = e.apply(cloud[n]);
          if (q.norm() < 4.0) worst = std::max(worst, dist(q));
        }
        CHECK(worst < 1e-9);
        CHECK(std::abs((e.matrix.transpose() * e.matrix - Mat3::Identity()).norm()) < 1e-12);
      }
      // Reflection through z = 0 is not a symmetry.
      double worst = 0;
      for (size_t n = 0; n < cloud.size(); n += 7) {
        Vec3 q = cloud[n];
        q.z() = -q.z();
        if (q.norm() < 4.0) worst = std::max(worst, dist(q));
      }
      CHECK(worst > 2 * hmax);
    }
  }

  TEST_CASE("straightening") {
    const int k = 2, m = 20;
    Straightening st = verbatim_straightening(k, m);
    CHECK(st.a == doctest::Approx(5 * kPi - 10));
    CHECK_THROWS_AS(verbatim_straightening(2, 4), Error);
    CHECK_THROWS_AS(verbatim_straightening(3, 14), Error);
    TowerChart ch(k);
    for (double u = 0.0; u < 12.0; u += 0.25)
      for (double v = -kPi / 2; v <= 0; v += kPi / 16) {
        Vec3 p = ch.normalized(cplx(u, v));
        Vec3 q = straightened_tower_map(k, m, TowerPoint{p}).position;
        if (p.x() < st.a) CHECK((q - p).norm() == 0.0);
        if (p.x() >= st.a + 1) CHECK(q.y() == 0.0);
        CHECK(q.x() == p.x());
        auto g = TowerGroupElement{1, 2, 1, 0};
        Vec3 a = straightened_tower_map(k, m, TowerPoint{tower_act(k, g, p)}).position;
        Vec3 b = tower_act(k, g, q);
        CHECK((a - b).norm() < 1e-12);
      }
  }
}
