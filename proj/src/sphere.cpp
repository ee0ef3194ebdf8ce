#include "desing/sphere.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "desing/error.hpp"

namespace desing {

Vec4 c2_to_r4(cplx z1, cplx z2) { return Vec4(z1.real(), z1.imag(), z2.real(), z2.imag()); }
cplx z1_of(const Vec4& p) { return {p[0], p[1]}; }
cplx z2_of(const Vec4& p) { return {p[2], p[3]}; }

PointS3 PointS3::make(const Vec4& v) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw Error(Errc::invalid_argument, "point not on S^3");
  return PointS3{v};
}

// ------------------------------------------------------------ circles

GreatCircle GreatCircle::make(const Vec4& e1, const Vec4& e2) {
  if (std::abs(e1.norm() - 1) > 1e-12 || std::abs(e2.norm() - 1) > 1e-12 ||
      std::abs(e1.dot(e2)) > 1e-12)
    throw Error(Errc::invalid_argument, "great circle frame not orthonormal");
  return GreatCircle{e1, e2};
}

GreatCircle GreatCircle::perp() const {
  // Gram-Schmidt against the standard basis, then fix the orientation.
  Vec4 f[2];
  int n = 0;
  for (int i = 0; i < 4 && n < 2; ++i) {
    Vec4 v = Vec4::Unit(i);
    v -= e1.dot(v) * e1 + e2.dot(v) * e2;
    for (int j = 0; j < n; ++j) v -= f[j].dot(v) * f[j];
    if (v.norm() > 1e-6) f[n++] = v.normalized();
  }
  Mat4 M;
  M << e1, e2, f[0], f[1];
  if (M.determinant() < 0) f[1] = -f[1];
  return GreatCircle{f[0], f[1]};
}

bool GreatCircle::same_set(const GreatCircle& o, double tol) const {
  return (projector() - o.projector()).norm() < tol;
}

double GreatCircle::distance(const Vec4& p) const {
  Vec4 in = e1.dot(p) * e1 + e2.dot(p) * e2;
  return std::atan2((p - in).norm(), in.norm());
}

double GreatCircle::phase(const Vec4& p) const { return std::atan2(e2.dot(p), e1.dot(p)); }

GreatCircle circle_C1() { return {Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0)}; }
GreatCircle circle_C2() { return {Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)}; }

GreatCircle circle_C(double phi1, double phi2) {
  return {c2_to_r4(std::polar(1.0, phi1), 0.0), c2_to_r4(0.0, std::polar(1.0, phi2))};
}

GreatCircle circle_Cprime(int k, int j) {
  const double s = std::sqrt(0.5);
  cplx b = std::polar(1.0, (j - 1) * kPi / k);
  return {c2_to_r4(s, s * b), c2_to_r4(cplx(0, s), cplx(0, 1) * s * b)};
}

GreatCircle circle_Cdouble(double psi) {
  const double s = std::sqrt(0.5);
  cplx b = std::polar(1.0, psi);
  return {c2_to_r4(s, s * b), c2_to_r4(cplx(0, s), -cplx(0, 1) * s * b)};
}

// ---------------------------------------------------------- isometries

SphereIsometry rotation_about_circle(const GreatCircle& C, double phi, int parity) {
  GreatCircle P = C.perp();
  double c = std::cos(phi), s = std::sin(phi);
  Mat4 M = C.projector();
  M += c * (P.e1 * P.e1.transpose() + P.e2 * P.e2.transpose());
  M += s * (P.e2 * P.e1.transpose() - P.e1 * P.e2.transpose());
  return {M, parity};
}

SphereIsometry diag_rotation(double a, double b) {
  Mat4 M = Mat4::Zero();
  M.block<2, 2>(0, 0) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  M.block<2, 2>(2, 2) << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
  return {M, 1};
}

// ------------------------------------------------------------- Phi map

Vec4 phi_cyl(double r, double theta, double z) {
  cplx e = std::polar(1.0, z);
  return c2_to_r4(e * std::cos(r), e * std::polar(std::sin(r), theta));
}

namespace {
double sinc(double r) { return std::abs(r) < 1e-4 ? 1.0 - r * r / 6.0 + r * r * r * r / 120.0 : std::sin(r) / r; }
}  // namespace

Vec4 phi(const Vec3& p) {
  double r = std::hypot(p.x(), p.y());
  cplx e = std::polar(1.0, p.z());
  return c2_to_r4(e * std::cos(r), e * cplx(p.x(), p.y()) * sinc(r));
}

Mat3 phi_pullback_metric_cyl(double r) {
  double s2 = std::sin(r) * std::sin(r);
  Mat3 g;
  g << 1, 0, 0, 0, s2, s2, 0, s2, 1;
  return g;
}

Mat3 phi_pullback_metric(const Vec3& p) {
  // g_E + (sin^2 r - r^2) dtheta^2 + 2 sin^2 r dtheta dz with r dtheta = (x dy - y dx)/r.
  double r = std::hypot(p.x(), p.y());
  double a, b;  // (sin^2 r - r^2)/r^2 and sin^2 r / r
  if (r < 1e-4) {
    a = -r * r / 3.0;
    b = r;
  } else {
    a = (std::sin(r) * std::sin(r) - r * r) / (r * r);
    b = std::sin(r) * std::sin(r) / r;
  }
  Vec3 t = r > 0 ? Vec3(-p.y() / r, p.x() / r, 0) : Vec3::Zero();
  Vec3 ez(0, 0, 1);
  Mat3 g = Mat3::Identity() + a * t * t.transpose() + b * (t * ez.transpose() + ez * t.transpose());
  return g;
}

Eigen::Matrix<double, 4, 3> phi_jacobian(const Vec3& p) {
  // Phi = e^{iz} (cos r, q sinc r) with q = x + i y.
  double x = p.x(), y = p.y(), r = std::hypot(x, y);
  cplx e = std::polar(1.0, p.z()), I(0, 1), q(x, y);
  double sc = sinc(r);
  // d sinc / dr / r, regular at 0.
  double dsc_r = r < 1e-4 ? -1.0 / 3.0 + r * r / 30.0 : (std::cos(r) - sc) / (r * r);
  // d cos r / dx = -sin r * x / r = -sc * x
  cplx d1x = e * (-sc * x), d1y = e * (-sc * y), d1z = I * e * std::cos(r);
  cplx d2x = e * (sc + q * dsc_r * x), d2y = e * (I * sc + q * dsc_r * y), d2z = I * e * q * sc;
  Eigen::Matrix<double, 4, 3> J;
  J.col(0) = c2_to_r4(d1x, d2x);
  J.col(1) = c2_to_r4(d1y, d2y);
  J.col(2) = c2_to_r4(d1z, d2z);
  return J;
}

// -------------------------------------------------------- Clifford tori

Vec4 CliffordTorus::sample(double s, double t) const {
  return std::sqrt(0.5) * (axis.at(s) + axis_perp.at(t));
}

double CliffordTorus::offset(const Vec4& p) const {
  return 0.5 * (axis_perp.distance(p) - axis.distance(p));
}

Vec4 CliffordTorus::normal(const Vec4& p) const {
  Vec4 a = axis.projector() * p, b = axis_perp.projector() * p;
  double na = a.norm(), nb = b.norm();
  Vec4 n = a * (nb / na) - b * (na / nb);
  n -= n.dot(p) * p;
  return n.normalized();
}

bool CliffordTorus::contains_circle(const GreatCircle& C, double tol) const {
  for (int i = 0; i < 16; ++i)
    if (std::abs(offset(C.at(2 * kPi * i / 16))) > tol) return false;
  return true;
}

CliffordTorus clifford_torus_of(const GreatCircle& C) { return {C, C.perp()}; }

// ------------------------------------------------------- configurations

namespace {

CliffordTorus rotate_torus(const SphereIsometry& R, const CliffordTorus& T) {
  GreatCircle a{R.apply(T.axis.e1), R.apply(T.axis.e2)};
  return clifford_torus_of(a);
}

}  // namespace

Configuration build_configuration(int k, Configuration::Kind kind) {
  if (k < 2) throw Error(Errc::invalid_argument, "configuration requires k >= 2");
  Configuration cfg;
  cfg.kind = kind;
  cfg.k = k;
  // T = Phi({y = 0}) has axis circle {e^{ia}(1, i)/sqrt 2}.
  const double s = std::sqrt(0.5);
  CliffordTorus T = clifford_torus_of(
      GreatCircle{c2_to_r4(s, cplx(0, s)), c2_to_r4(cplx(0, s), -s)});
  for (int j = 1; j <= k; ++j)
    cfg.tori.push_back(rotate_torus(rotation_about_circle(circle_C1(), (j - 1) * kPi / k), T));
  if (kind == Configuration::Kind::Wprime) cfg.tori.push_back(clifford_torus_of(circle_C1()));

  std::vector<GreatCircle> cand = {circle_C1(), circle_C2()};
  if (kind == Configuration::Kind::Wprime)
    for (int j = 1; j <= 2 * k; ++j) cand.push_back(circle_Cprime(k, j));
  for (const auto& C : cand) {
    int mult = 0;
    for (const auto& t : cfg.tori) mult += t.contains_circle(C, 1e-12);
    cfg.intersection_circles.push_back({C, mult});
  }
  return cfg;
}

Scaffolding build_scaffolding(int k, int m, Scaffolding::Kind kind) {
  if (k < 2 || m < 1) throw Error(Errc::invalid_argument, "scaffolding requires k >= 2, m >= 1");
  Scaffolding sc;
  sc.kind = kind;
  auto add = [&](const GreatCircle& C) {
    for (const auto& D : sc.circles)
      if (D.same_set(C)) return;
    sc.circles.push_back(C);
  };
  auto add_C = [&](int mm) {
    for (int j = 0; j < 2 * k * mm; ++j)
      for (int l = 0; l < 2 * k; ++l) {
        double a = j * kPi / (k * mm);
        add(circle_C(a, a + l * kPi / k));
      }
  };
  switch (kind) {
    case Scaffolding::Kind::C:
      add_C(m);
      break;
    case Scaffolding::Kind::Cprime:
      add_C(2 * m);
      for (int j = 0; j < 2 * k * m; ++j) add(circle_Cdouble(j * kPi / (k * m)));
      break;
    case Scaffolding::Kind::Cmin:
      add(circle_C(0, 0));
      add(circle_C(0, kPi / 2));
      break;
  }
  return sc;
}

// --------------------------------------------------------------- groups

std::vector<SphereIsometry> group_closure(const std::vector<SphereIsometry>& gens, size_t bound) {
  std::vector<SphereIsometry> elems{SphereIsometry{}};
  std::map<std::array<long long, 16>, std::vector<size_t>> index;
  auto key = [](const Mat4& M) {
    std::array<long long, 16> kk;
    for (int i = 0; i < 16; ++i) kk[i] = std::llround(M.data()[i] * 1e6);
    return kk;
  };
  auto find = [&](const Mat4& M) -> long {
    auto it = index.find(key(M));
    if (it == index.end()) return -1;
    for (size_t id : it->second)
      if ((elems[id].matrix - M).norm() < 1e-9) return long(id);
    return -1;
  };
  index[key(elems[0].matrix)].push_back(0);
  for (size_t q = 0; q < elems.size(); ++q) {
    for (const auto& g : gens) {
      SphereIsometry h = elems[q].compose(g);
      long id = find(h.matrix);
      if (id >= 0) {
        if (elems[id].parity != h.parity)
          throw Error(Errc::invalid_argument, "parity is not consistent on the generated group");
        continue;
      }
      if (elems.size() >= bound)
        throw Error(Errc::closure_overflow, "group enumeration exceeded the configured bound");
      index[key(h.matrix)].push_back(elems.size());
      elems.push_back(h);
    }
  }
  return elems;
}

std::vector<SphereIsometry> build_symmetry_group(int k, int m, GroupKind kind, size_t bound) {
  if (k < 2 || m < 1) throw Error(Errc::invalid_argument, "group requires k >= 2, m >= 1");
  std::vector<SphereIsometry> gens;
  auto base = [&](int mm) {
    gens.push_back(rotation_about_circle(circle_C(0, 0), kPi, -1));
    gens.push_back(diag_rotation(2 * kPi / (k * mm), 2 * kPi / (k * mm)));
    gens.push_back(rotation_about_circle(circle_C1(), 2 * kPi / k, 1));
  };
  switch (kind) {
    case GroupKind::G:
      base(m);
      break;
    case GroupKind::Gprime:
      base(2 * m);
      gens.push_back(rotation_about_circle(circle_Cprime(k, 1), kPi, 1));
      break;
    case GroupKind::Gmin:
      gens.push_back(rotation_about_circle(circle_C(0, 0), kPi, -1));
      gens.push_back(rotation_about_circle(circle_C(0, kPi / 2), kPi, -1));
      break;
  }
  return group_closure(gens, bound);
}

std::vector<SphereIsometry> reflection_group(const Scaffolding& sc, size_t bound) {
  std::vector<SphereIsometry> gens;
  for (const auto& C : sc.circles) gens.push_back(rotation_about_circle(C, kPi, -1));
  return group_closure(gens, bound);
}

IntertwineResiduals intertwine_check(double c, double r) {
  IntertwineResiduals res;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SphereIsometry Rc = rotation_about_circle(circle_C1(), c);
  SphereIsometry Rx = rotation_about_circle(circle_C(0, 0), kPi);
  SphereIsometry Tc = rotation_about_circle(circle_C1(), c).compose(rotation_about_circle(circle_C2(), c));
  for (int n = 0; n < 200; ++n) {
    double rr = r >= 0 ? r : 1.5 * U(rng);
    double th = 2 * kPi * U(rng), z = 2 * kPi * U(rng);
    Vec4 p = phi_cyl(rr, th, z);
    res.rotation = std::max(res.rotation, (phi_cyl(rr, th + c, z) - Rc.apply(p)).norm());
    res.x_rotation = std::max(res.x_rotation, (phi_cyl(rr, -th, -z) - Rx.apply(p)).norm());
    res.translation = std::max(res.translation, (phi_cyl(rr, th, z + c) - Tc.apply(p)).norm());
  }
  return res;
}

}  // namespace desing
