#include "desing/tower.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "desing/error.hpp"

namespace desing {

namespace {

void require_k(int k) {
  if (k < 2) throw Error(Errc::invalid_argument, "tower requires k >= 2");
}

double bump_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double cutoff_template(double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double p = bump_tail(1.0 + s);
  double q = bump_tail(1.0 - s);
  return p / (p + q);
}

double cutoff(double a, double b, double t) {
  if (a == b) throw Error(Errc::invalid_argument, "cutoff needs a != b");
  return cutoff_template(-3.0 + 6.0 * (t - a) / (b - a));
}

cplx root_of_minus_one(int k, int j) {
  return std::polar(1.0, kPi * (2.0 * j - 1.0) / (2.0 * k));
}

UnitDiscParameter UnitDiscParameter::make(int k, cplx w) {
  require_k(k);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > 1.0 + 1e-12)
    throw Error(Errc::invalid_argument, "parameter outside the closed unit disc");
  for (int j = 1; j <= 2 * k; ++j)
    if (std::abs(w - root_of_minus_one(k, j)) < 1e-300)
      throw Error(Errc::singular_parameter, "parameter at a root of -1");
  return UnitDiscParameter{w};
}

// ---------------------------------------------------------------- chart

TowerChart::TowerChart(int k) : k_(k) {
  require_k(k);
  for (int j = 1; j <= 2 * k; ++j) om_.push_back(root_of_minus_one(k, j));
  om1_ = om_[0];
  rot_ = double(k) * om1_;
  for (int j = 2; j <= 2 * k; ++j)
    c_ -= (std::conj(om1_) * om_[j - 1]).real() * std::log(std::abs(om1_ - om_[j - 1]));
  xi_corner_ = xi_on_real_segment(1.0);
  xc_ = normalized(xi_corner_).x();
}

cplx TowerChart::w_of_xi(cplx xi) const { return om1_ * (1.0 - std::exp(-xi)); }

cplx TowerChart::xi_of_w(cplx w) const {
  cplx d = 1.0 - w / om1_;
  if (std::abs(d) < 1e-300) throw Error(Errc::singular_parameter, "parameter at omega_1");
  return -std::log(d);
}

cplx TowerChart::xi_on_real_segment(double t) const { return -std::log(1.0 - t * std::conj(om1_)); }

cplx TowerChart::xi_on_arc(double alpha) const {
  return -std::log(1.0 - std::polar(1.0, alpha));
}

Vec3 TowerChart::raw(cplx xi) const {
  const double inv_k = 1.0 / k_;
  cplx w = w_of_xi(xi);
  double x = om1_.real() * xi.real();
  double y = -om1_.imag() * xi.real();
  double z = -xi.imag();
  double sgn = -1.0;
  for (int j = 2; j <= 2 * k_; ++j, sgn = -sgn) {
    cplx oj = om_[j - 1];
    double l = std::log(std::abs(w - oj));
    x -= oj.real() * l;
    y += oj.imag() * l;
    z += sgn * std::arg(1.0 - w / oj);
  }
  return Vec3(x * inv_k, y * inv_k, z * inv_k);
}

Vec3 TowerChart::normalized(cplx xi) const {
  Vec3 r = raw(xi);
  cplx q = rot_ * cplx(r.x(), r.y());
  return Vec3(q.real(), q.imag(), k_ * r.z());
}

Jet3 TowerChart::raw_jet(cplx xi) const {
  const double inv_k = 1.0 / k_;
  const cplx I(0.0, 1.0);
  cplx w = w_of_xi(xi);
  cplx wp = om1_ * std::exp(-xi);
  cplx dx = om1_.real(), dy = -om1_.imag(), dz = I;
  cplx ddx = 0.0, ddy = 0.0, ddz = 0.0;
  double sgn = -1.0;
  for (int j = 2; j <= 2 * k_; ++j, sgn = -sgn) {
    cplx oj = om_[j - 1];
    cplx q = wp / (w - oj);
    cplx qp = -q - q * q;
    dx -= oj.real() * q;
    ddx -= oj.real() * qp;
    dy += oj.imag() * q;
    ddy += oj.imag() * qp;
    dz -= sgn * I * q;
    ddz -= sgn * I * qp;
  }
  Jet3 J;
  J.p = raw(xi);
  const cplx d1[3] = {dx, dy, dz};
  const cplx d2[3] = {ddx, ddy, ddz};
  for (int c = 0; c < 3; ++c) {
    J.pu[c] = d1[c].real() * inv_k;
    J.pv[c] = -d1[c].imag() * inv_k;
    J.puu[c] = d2[c].real() * inv_k;
    J.puv[c] = -d2[c].imag() * inv_k;
    J.pvv[c] = -d2[c].real() * inv_k;
  }
  return J;
}

Jet3 TowerChart::normalized_jet(cplx xi) const {
  Jet3 J = raw_jet(xi);
  auto map = [&](Vec3& v) {
    cplx q = rot_ * cplx(v.x(), v.y());
    v = Vec3(q.real(), q.imag(), k_ * v.z());
  };
  map(J.p);
  map(J.pu);
  map(J.pv);
  map(J.puu);
  map(J.puv);
  map(J.pvv);
  return J;
}

// ---------------------------------------------------------- closed forms

TowerPoint weierstrass_map(int k, const UnitDiscParameter& w) {
  UnitDiscParameter::make(k, w.w);
  TowerChart ch(k);
  return TowerPoint{ch.raw(ch.xi_of_w(w.w))};
}

std::array<cplx, 3> weierstrass_differential(int k, const UnitDiscParameter& w) {
  UnitDiscParameter::make(k, w.w);
  cplx z = w.w;
  cplx z2k2 = std::pow(z, 2 * k - 2);
  cplx den = 1.0 + std::pow(z, 2 * k);
  if (std::abs(den) < 1e-300) throw Error(Errc::singular_parameter, "root of -1");
  return {(1.0 - z2k2) / den, cplx(0, 1) * (1.0 + z2k2) / den,
          2.0 * std::pow(z, k - 1) / den};
}

double tower_metric_density(int k, const UnitDiscParameter& w) {
  UnitDiscParameter::make(k, w.w);
  double r = std::abs(w.w);
  double den = std::abs(1.0 + std::pow(w.w, 2 * k));
  if (den < 1e-300) throw Error(Errc::singular_parameter, "root of -1");
  double num = 1.0 + std::pow(r, 2 * k - 2);
  return num * num / (den * den);
}

double second_form_tower(int k, const UnitDiscParameter& w, cplx V) {
  UnitDiscParameter::make(k, w.w);
  cplx den = std::pow(w.w, 2 * k) + 1.0;
  if (std::abs(den) < 1e-300) throw Error(Errc::singular_parameter, "root of -1");
  return 2.0 * (k - 1) * (V * V * std::pow(w.w, k - 2) / den).real();
}

// ------------------------------------------------------------------ wing

namespace {

bool in_sector(const TowerChart& ch, cplx xi, double tol) {
  if (xi.imag() < -kPi / 2 - tol || xi.imag() > tol) return false;
  cplx w = ch.w_of_xi(xi);
  if (std::abs(w) > 1.0 + tol) return false;
  if (std::abs(w) < tol) return true;
  double a = std::arg(w);
  return a >= -tol && a <= kPi / (2.0 * ch.k()) + tol;
}

}  // namespace

WingSolution wing_solve(int k, double s, double z) {
  require_k(k);
  if (!std::isfinite(s) || !std::isfinite(z))
    throw Error(Errc::invalid_argument, "non-finite wing coordinates");
  TowerChart ch(k);
  // Fold Z = k z into [0, pi/2] using W(-Z) = -W(Z) and W(pi - Z) = W(Z).
  double Z = std::remainder(k * z, 2.0 * kPi);
  double sign = 1.0;
  if (Z < 0) {
    Z = -Z;
    sign = -1.0;
  }
  if (Z > kPi / 2) Z = kPi - Z;
  const double X = k * s;

  cplx xi(X - ch.wing_constant(), -Z);
  auto residual = [&](cplx q, Eigen::Vector2d& F) {
    Vec3 p = ch.normalized(q);
    F = Eigen::Vector2d(p.x() - X, p.z() - Z);
    return F.lpNorm<Eigen::Infinity>();
  };
  Eigen::Vector2d F;
  double res = residual(xi, F);
  const double tol = 1e-12 * std::max(1.0, std::abs(X));
  int it = 0;
  for (; it < 50 && res > tol; ++it) {
    Jet3 J = ch.normalized_jet(xi);
    Mat2 A;
    A << J.pu.x(), J.pv.x(), J.pu.z(), J.pv.z();
    if (std::abs(A.determinant()) < 1e-300) break;
    Eigen::Vector2d d = -A.inverse() * F;
    double step = 1.0;
    Eigen::Vector2d Ft;
    double rt = residual(xi + step * cplx(d[0], d[1]), Ft);
    for (int h = 0; h < 30 && !(rt < res); ++h) {
      step *= 0.5;
      rt = residual(xi + step * cplx(d[0], d[1]), Ft);
    }
    xi += step * cplx(d[0], d[1]);
    F = Ft;
    res = rt;
  }
  if (!(res <= tol) || !in_sector(ch, xi, 1e-9)) {
    std::ostringstream os;
    os << "wing inversion failed at (s,z)=(" << s << "," << z << "), last xi=" << xi
       << ", residual=" << res;
    throw Error(Errc::newton_divergence, os.str());
  }
  WingSolution out;
  out.s = s;
  out.z = z;
  out.xi = xi;
  out.w = ch.w_of_xi(xi);
  out.iterations = it;
  out.residual = res;
  out.t = (Z == 0.0) ? 0.0 : sign * ch.normalized(xi).y() / k;
  return out;
}

double wing_height(int k, double s, double z) { return wing_solve(k, s, z).t; }

double wing_onset_radius(int k) {
  require_k(k);
  static std::mutex mu;
  static std::map<int, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
  }
  TowerChart ch(k);
  const double s_graph = ch.corner_x() / k;
  const double ds = 0.01;
  const int nz = 16;
  double onset = s_graph + 6.0;
  for (double s = onset; s >= s_graph - 1e-12; s -= ds) {
    bool ok = true;
    for (int j = 0; j <= nz && ok; ++j) {
      double z = (kPi / (2.0 * k)) * j / nz;
      try {
        WingSolution sol = wing_solve(k, s, z);
        Jet3 J = ch.normalized_jet(sol.xi);
        double det = J.pu.x() * J.pv.z() - J.pv.x() * J.pu.z();
        if (!(det < 0)) ok = false;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) break;
    onset = s;
  }
  onset = std::max(onset, s_graph);
  std::lock_guard<std::mutex> lock(mu);
  cache[k] = onset;
  return onset;
}

WingChart build_wing_chart(int k, double s_min, double s_max, int n_s, int n_z) {
  require_k(k);
  if (!(s_min > 0) || !(s_max > s_min) || n_s < 2 || n_z < 2)
    throw Error(Errc::invalid_argument, "bad wing chart range");
  WingChart c;
  c.k = k;
  c.s_min = s_min;
  for (int i = 0; i < n_s; ++i) c.s.push_back(s_min + (s_max - s_min) * i / (n_s - 1));
  for (int j = 0; j < n_z; ++j) c.z.push_back((2.0 * kPi / k) * j / (n_z - 1));
  for (double s : c.s)
    for (double z : c.z) c.t.push_back(wing_height(k, s, z));
  return c;
}

double wing_decay_fit(int k, double s_lo, double s_hi, int n_s, int n_z) {
  require_k(k);
  if (!(s_hi > s_lo) || n_s < 3 || n_z < 2)
    throw Error(Errc::insufficient_samples, "decay fit needs at least 3 abscissae");
  std::vector<double> xs, ys;
  for (int i = 0; i < n_s; ++i) {
    double s = s_lo + (s_hi - s_lo) * i / (n_s - 1);
    double mx = 0.0;
    for (int j = 1; j < n_z; ++j)
      mx = std::max(mx, std::abs(wing_height(k, s, (kPi / (2.0 * k)) * j / (n_z - 1))));
    if (mx > 0 && std::isfinite(std::log(mx))) {
      xs.push_back(s);
      ys.push_back(std::log(mx));
    }
  }
  if (xs.size() < 3) throw Error(Errc::insufficient_samples, "too few nonzero wing heights");
  double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ------------------------------------------------------------ symmetries

namespace {

int pmod(int a, int n) { return ((a % n) + n) % n; }

const std::map<std::array<int, 4>, int>& parity_table(int k) {
  static std::mutex mu;
  static std::map<int, std::map<std::array<int, 4>, int>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(k);
  if (it != tables.end()) return it->second;
  // Generated by the Gamma_a rotation (odd) and the Gamma_b, Gamma_c reflections (even).
  const TowerGroupElement gens[3] = {{-1, 0, -1, 0}, {1, 0, -1, 1}, {-1, 1, 1, 0}};
  const int gpar[3] = {-1, 1, 1};
  auto key = [&](const TowerGroupElement& g) {
    return std::array<int, 4>{g.e1, pmod(g.i, 2 * k), g.e2, pmod(g.j, 2)};
  };
  std::map<std::array<int, 4>, int> tab;
  std::vector<TowerGroupElement> queue{{1, 0, 1, 0}};
  tab[key(queue[0])] = 1;
  for (size_t q = 0; q < queue.size(); ++q) {
    TowerGroupElement g = queue[q];
    int pg = tab[key(g)];
    for (int a = 0; a < 3; ++a) {
      TowerGroupElement h = tower_compose(g, gens[a]);
      h = TowerGroupElement{h.e1, pmod(h.i, 2 * k), h.e2, pmod(h.j, 2)};
      auto kh = key(h);
      auto f = tab.find(kh);
      if (f == tab.end()) {
        tab[kh] = pg * gpar[a];
        queue.push_back(h);
      } else if (f->second != pg * gpar[a]) {
        throw Error(Errc::invalid_argument, "inconsistent tower parity");
      }
    }
  }
  return tables.emplace(k, std::move(tab)).first->second;
}

}  // namespace

bool in_tower_group(const TowerGroupElement& g) {
  int n = g.i + g.j + (g.e1 < 0) + (g.e2 < 0);
  return (n % 2 + 2) % 2 == 0;
}

TowerGroupElement tower_compose(const TowerGroupElement& a, const TowerGroupElement& b) {
  return {a.e1 * b.e1, a.i + a.e1 * b.i, a.e2 * b.e2, a.j + a.e2 * b.j};
}

TowerGroupElement tower_inverse(const TowerGroupElement& g) {
  return {g.e1, -g.e1 * g.i, g.e2, -g.e2 * g.j};
}

TowerGroupElement tower_reduce(int k, const TowerGroupElement& g, int j_period) {
  return {g.e1, pmod(g.i, 2 * k), g.e2, j_period > 0 ? pmod(g.j, j_period) : g.j};
}

int tower_parity(int k, const TowerGroupElement& g) {
  const auto& tab = parity_table(k);
  auto it = tab.find({g.e1, pmod(g.i, 2 * k), g.e2, pmod(g.j, 2)});
  if (it == tab.end()) throw Error(Errc::invalid_argument, "element not in the tower group");
  return it->second;
}

Vec3 tower_act(int k, const TowerGroupElement& g, const Vec3& p) {
  cplx q(p.x(), g.e1 * p.y());
  q *= std::polar(1.0, g.i * kPi / k);
  return Vec3(q.real(), q.imag(), g.e2 * p.z() + g.j * kPi);
}

std::vector<TowerGroupElement> tower_group(int k, int j_period) {
  std::vector<TowerGroupElement> out;
  for (int e1 : {1, -1})
    for (int e2 : {1, -1})
      for (int i = 0; i < 2 * k; ++i)
        for (int j = 0; j < j_period; ++j) {
          TowerGroupElement g{e1, i, e2, j};
          if (in_tower_group(g)) out.push_back(g);
        }
  return out;
}

EuclideanSymmetry EuclideanSymmetry::compose(const EuclideanSymmetry& inner) const {
  EuclideanSymmetry r;
  r.matrix = matrix * inner.matrix;
  r.offset = matrix * inner.offset + offset;
  r.parity = parity * inner.parity;
  double det = r.matrix.determinant();
  if (det < 0)
    r.kind = Kind::reflection_through_plane;
  else if ((r.matrix - Mat3::Identity()).norm() > 1e-12 &&
           std::abs(r.matrix.trace() + 1.0) < 1e-12)
    r.kind = Kind::rotation_about_line;
  else
    r.kind = Kind::screw;
  return r;
}

EuclideanSymmetry to_euclidean(int k, const TowerGroupElement& g) {
  EuclideanSymmetry s;
  double c = std::cos(g.i * kPi / k), sn = std::sin(g.i * kPi / k);
  s.matrix << c, -sn * g.e1, 0, sn, c * g.e1, 0, 0, 0, g.e2;
  s.offset = Vec3(0, 0, g.j * kPi);
  s.parity = tower_parity(k, g);
  if (g.e1 * g.e2 < 0)
    s.kind = EuclideanSymmetry::Kind::reflection_through_plane;
  else if (g.e1 < 0)
    s.kind = EuclideanSymmetry::Kind::rotation_about_line;
  else
    s.kind = EuclideanSymmetry::Kind::screw;
  return s;
}

TowerPatch build_tower_patch(int k, bool normalized, int n_r, int n_theta) {
  require_k(k);
  if (n_r < 2 || n_theta < 2) throw Error(Errc::invalid_argument, "patch resolution too small");
  TowerChart ch(k);
  TowerPatch P;
  P.k = k;
  P.normalized = normalized;
  P.n_r = n_r;
  P.n_theta = n_theta;
  // Geometric refinement toward |w| = 1 and toward the wing direction.
  const double rho_r = std::pow(0.02, 1.0 / n_r), rho_t = std::pow(0.05, 1.0 / n_theta);
  for (int i = 0; i <= n_r; ++i) {
    double r = (1.0 - std::pow(rho_r, i)) / (1.0 - std::pow(rho_r, n_r));
    for (int j = 0; j <= n_theta; ++j) {
      double th = (kPi / (2.0 * k)) * (1.0 - std::pow(rho_t, j)) / (1.0 - std::pow(rho_t, n_theta));
      cplx w = std::polar(r, th);
      if (std::abs(w - ch.omega(1)) < 1e-9) continue;
      cplx xi = ch.xi_of_w(w);
      P.w.push_back(w);
      P.points.push_back(normalized ? ch.normalized(xi) : ch.raw(xi));
    }
  }
  const TowerGroupElement gens[5] = {
      {1, 2, 1, 0}, {-1, 0, -1, 0}, {1, 0, 1, 2}, {1, 0, -1, 1}, {-1, 1, 1, 0}};
  for (const auto& g : gens) {
    EuclideanSymmetry e = to_euclidean(k, g);
    if (!normalized) {
      // Conjugate by the normalization p -> k R^{pi/2k} p.
      double a = kPi / (2.0 * k);
      Mat3 R;
      R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
      e.matrix = R.transpose() * e.matrix * R;
      e.offset = R.transpose() * e.offset / double(k);
    }
    P.generators.push_back(e);
  }
  return P;
}

// ---------------------------------------------------------- straightening

Straightening verbatim_straightening(int k, int m) {
  require_k(k);
  if (m < 1) throw Error(Errc::invalid_argument, "m must be positive");
  Straightening st{m * kPi / 4.0 - 10.0, 0.0};
  st.b = st.a + 1.0;
  double onset = k * wing_onset_radius(k);
  if (!(st.a > onset)) {
    std::ostringstream os;
    os << "a_m = m pi/4 - 10 = " << st.a << " does not exceed the wing onset " << onset
       << " for k=" << k << " (need m >= " << int(std::ceil(4.0 * (onset + 10.0) / kPi + 1e-9))
       << ")";
    throw Error(Errc::m_too_small, os.str());
  }
  return st;
}

Vec3 apply_straightening(int k, const Straightening& st, const Vec3& p) {
  double th = std::atan2(p.y(), p.x());
  int i = int(std::lround(th / (kPi / k)));
  cplx q = cplx(p.x(), p.y()) * std::polar(1.0, -i * kPi / k);
  if (q.real() > st.a) q = cplx(q.real(), q.imag() * cutoff(st.b, st.a, q.real()));
  q *= std::polar(1.0, i * kPi / k);
  return Vec3(q.real(), q.imag(), p.z());
}

TowerPoint straightened_tower_map(int k, int m, const TowerPoint& p) {
  return TowerPoint{apply_straightening(k, verbatim_straightening(k, m), p.position)};
}

}  // namespace desing
