#pragma once

#include <array>
#include <vector>

#include "desing/types.hpp"

namespace desing {

// Smooth monotone template: 0 on (-inf,-1], 1 on [1,inf), and Psi - 1/2 odd.
double cutoff_template(double s);

// psi[a,b](t): 0 near a, 1 near b.
double cutoff(double a, double b, double t);

struct UnitDiscParameter {
  cplx w;
  // Validates |w| <= 1 + 1e-12 and w away from the 2k-th roots of -1.
  static UnitDiscParameter make(int k, cplx w);
};

struct TowerPoint {
  Vec3 position = Vec3::Zero();
};

// omega_j = exp(i pi (2j-1) / 2k), j = 1..2k.
cplx root_of_minus_one(int k, int j);

// Closed-form Weierstrass integrals; the fundamental sector D maps into
// {-pi/2k <= theta <= 0, 0 <= z <= pi/2k}.
TowerPoint weierstrass_map(int k, const UnitDiscParameter& w);
std::array<cplx, 3> weierstrass_differential(int k, const UnitDiscParameter& w);
double tower_metric_density(int k, const UnitDiscParameter& w);
double second_form_tower(int k, const UnitDiscParameter& w, cplx V);

// The tower evaluated through xi = -Log(1 - w/omega_1). The wing end at
// omega_1 becomes Re xi -> +inf, D becomes a half-strip with
// Im xi in [-pi/2, 0], and the logarithmic pole is handled exactly.
class TowerChart {
 public:
  explicit TowerChart(int k);

  int k() const { return k_; }
  cplx omega(int j) const { return om_[j - 1]; }

  cplx w_of_xi(cplx xi) const;
  cplx xi_of_w(cplx w) const;
  cplx xi_on_real_segment(double t) const;  // w = t in [0,1]
  cplx xi_on_arc(double alpha) const;       // w = omega_1 e^{i alpha}, alpha in [-pi/2k, 0)
  cplx xi_corner() const { return xi_corner_; }

  Vec3 raw(cplx xi) const;         // before normalization
  Vec3 normalized(cplx xi) const;  // S_k = k R^{pi/2k} (raw): wing along +x
  Jet3 raw_jet(cplx xi) const;     // partials in (Re xi, Im xi)
  Jet3 normalized_jet(cplx xi) const;

  // c = lim (k s + ln|w - omega_1|) at the wing end.
  double wing_constant() const { return c_; }
  // Normalized x at the corner w = 1; the wing is a graph beyond it.
  double corner_x() const { return xc_; }

 private:
  int k_;
  std::vector<cplx> om_;
  cplx om1_, rot_;
  double c_ = 0.0, xc_ = 0.0;
  cplx xi_corner_;
};

// ---- wing asymptotics (raw units: s along the wing, t graph height) ----

struct WingSolution {
  double s = 0, z = 0, t = 0;
  cplx w, xi;
  int iterations = 0;
  double residual = 0;
};

WingSolution wing_solve(int k, double s, double z);
double wing_height(int k, double s, double z);
// Smallest s where Newton converges for all z in a period and the wing is a graph.
double wing_onset_radius(int k);

struct WingChart {
  int k = 2;
  double s_min = 0;
  std::vector<double> s, z;
  std::vector<double> t;  // row-major, t[i * z.size() + j]
};
WingChart build_wing_chart(int k, double s_min, double s_max, int n_s, int n_z);

// Least-squares slope of log max_z |W_k(s, .)| over [s_lo, s_hi].
double wing_decay_fit(int k, double s_lo, double s_hi, int n_s = 21, int n_z = 17);

// ---- symmetries of the normalized tower ----

// theta -> e1 theta + i pi/k, z -> e2 z + j pi.
struct TowerGroupElement {
  int e1 = 1, i = 0, e2 = 1, j = 0;
  bool operator==(const TowerGroupElement&) const = default;
};

bool in_tower_group(const TowerGroupElement& g);
TowerGroupElement tower_compose(const TowerGroupElement& a, const TowerGroupElement& b);
TowerGroupElement tower_inverse(const TowerGroupElement& g);
// Reduce i mod 2k and j mod j_period (j_period <= 0 leaves j alone).
TowerGroupElement tower_reduce(int k, const TowerGroupElement& g, int j_period);
// Action on normals: -1 when the element swaps the sides of the tower.
int tower_parity(int k, const TowerGroupElement& g);
Vec3 tower_act(int k, const TowerGroupElement& g, const Vec3& p);
// All elements with i mod 2k and j mod j_period.
std::vector<TowerGroupElement> tower_group(int k, int j_period);

struct EuclideanSymmetry {
  enum class Kind { rotation_about_line, reflection_through_plane, screw };
  Kind kind = Kind::screw;
  Mat3 matrix = Mat3::Identity();
  Vec3 offset = Vec3::Zero();
  int parity = 1;

  Vec3 apply(const Vec3& p) const { return matrix * p + offset; }
  EuclideanSymmetry compose(const EuclideanSymmetry& inner) const;
};

EuclideanSymmetry to_euclidean(int k, const TowerGroupElement& g);

struct TowerPatch {
  int k = 2;
  bool normalized = true;
  int n_r = 0, n_theta = 0;
  std::vector<cplx> w;
  std::vector<Vec3> points;
  std::vector<EuclideanSymmetry> generators;
};

TowerPatch build_tower_patch(int k, bool normalized, int n_r = 128, int n_theta = 64);

// ---- straightened wings ----

// psi[b,a] is applied to the graph height: 1 for x <= a, 0 for x >= b.
struct Straightening {
  double a = 0, b = 0;
};

// a = m pi/4 - 10, b = a + 1; rejects a not beyond the onset radius.
Straightening verbatim_straightening(int k, int m);
Vec3 apply_straightening(int k, const Straightening& st, const Vec3& p);
TowerPoint straightened_tower_map(int k, int m, const TowerPoint& p);

}  // namespace desing
