#pragma once

#include <vector>

#include "desing/types.hpp"

namespace desing {

// R^4 coordinates are (Re z1, Im z1, Re z2, Im z2).
Vec4 c2_to_r4(cplx z1, cplx z2);
cplx z1_of(const Vec4& p);
cplx z2_of(const Vec4& p);

struct PointS3 {
  Vec4 v;
  static PointS3 make(const Vec4& v);  // requires |v| = 1 to 1e-12
};

struct GreatCircle {
  Vec4 e1, e2;

  static GreatCircle make(const Vec4& e1, const Vec4& e2);
  Vec4 at(double t) const { return std::cos(t) * e1 + std::sin(t) * e2; }
  Mat4 projector() const { return e1 * e1.transpose() + e2 * e2.transpose(); }
  // Oriented so that (e1, e2, f1, f2) is a positive frame of R^4.
  GreatCircle perp() const;
  bool same_set(const GreatCircle& o, double tol = 1e-9) const;
  double distance(const Vec4& p) const;  // spherical distance
  // Angle of the projection of p onto the circle's plane.
  double phase(const Vec4& p) const;
};

GreatCircle circle_C1();
GreatCircle circle_C2();
GreatCircle circle_C(double phi1, double phi2);  // {(e^{i phi1} cos r, e^{i phi2} sin r)}
GreatCircle circle_Cprime(int k, int j);         // {|z1|=|z2|, z2 = e^{i(j-1)pi/k} z1}
GreatCircle circle_Cdouble(double psi);          // {(e^{iz}, e^{i(psi-z)})/sqrt 2}

struct SphereIsometry {
  Mat4 matrix = Mat4::Identity();
  int parity = 1;

  Vec4 apply(const Vec4& p) const { return matrix * p; }
  SphereIsometry compose(const SphereIsometry& inner) const {
    return {matrix * inner.matrix, parity * inner.parity};
  }
  SphereIsometry inverse() const { return {matrix.transpose(), parity}; }
  double orthogonality_defect() const {
    return (matrix.transpose() * matrix - Mat4::Identity()).norm();
  }
};

SphereIsometry rotation_about_circle(const GreatCircle& C, double phi, int parity = 1);
// Complex-diagonal rotation z1 -> e^{ia} z1, z2 -> e^{ib} z2.
SphereIsometry diag_rotation(double a, double b);

// Phi(r, theta, z) = e^{iz}(cos r, e^{i theta} sin r).
Vec4 phi_cyl(double r, double theta, double z);
Vec4 phi(const Vec3& p);  // Cartesian input
// dr^2 + sin^2 r dtheta^2 + 2 sin^2 r dtheta dz + dz^2 in (r, theta, z).
Mat3 phi_pullback_metric_cyl(double r);
// The same metric in Cartesian coordinates; regular at r = 0.
Mat3 phi_pullback_metric(const Vec3& p);
// Differential of phi at a Cartesian point.
Eigen::Matrix<double, 4, 3> phi_jacobian(const Vec3& p);

struct CliffordTorus {
  GreatCircle axis, axis_perp;
  Vec4 sample(double s, double t) const;
  // Signed spherical offset from the torus (positive toward axis).
  double offset(const Vec4& p) const;
  // Unit normal in T_p S^3 pointing toward axis.
  Vec4 normal(const Vec4& p) const;
  bool contains_circle(const GreatCircle& C, double tol = 1e-12) const;
};

CliffordTorus clifford_torus_of(const GreatCircle& C);

struct IntersectionCircle {
  GreatCircle circle;
  int multiplicity = 0;
};

struct Configuration {
  enum class Kind { W, Wprime };
  Kind kind = Kind::W;
  int k = 2;
  std::vector<CliffordTorus> tori;  // T_1..T_k, then T' for Wprime
  std::vector<IntersectionCircle> intersection_circles;
};

Configuration build_configuration(int k, Configuration::Kind kind);

struct Scaffolding {
  enum class Kind { C, Cprime, Cmin };
  Kind kind = Kind::C;
  std::vector<GreatCircle> circles;
};

Scaffolding build_scaffolding(int k, int m, Scaffolding::Kind kind);

enum class GroupKind { G, Gprime, Gmin };

// Closure of generators with deduplication by matrix distance.
std::vector<SphereIsometry> group_closure(const std::vector<SphereIsometry>& gens,
                                          size_t bound = 1000000);
std::vector<SphereIsometry> build_symmetry_group(int k, int m, GroupKind kind,
                                                 size_t bound = 1000000);
// Group generated by the half-turns about every scaffold circle.
std::vector<SphereIsometry> reflection_group(const Scaffolding& sc, size_t bound = 1000000);

struct IntertwineResiduals {
  double rotation = 0, x_rotation = 0, translation = 0;
};

IntertwineResiduals intertwine_check(double c, double r = -1.0);

}  // namespace desing
