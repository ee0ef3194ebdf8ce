#include "desing/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include <boost/math/tools/roots.hpp>

#include "desing/error.hpp"

namespace desing {

// ------------------------------------------------------------------ spec

InitialSurfaceSpec InitialSurfaceSpec::M(int k, int m, int n1, int n2, int sigma) {
  InitialSurfaceSpec s;
  s.variant = Variant::M;
  s.k = k, s.m = m, s.n1 = n1, s.n2 = n2, s.sigma = sigma;
  return s;
}

InitialSurfaceSpec InitialSurfaceSpec::N(int k, int m, int n, int np1, int npm1, int sp1,
                                         int spm1) {
  InitialSurfaceSpec s;
  s.variant = Variant::N;
  s.k = k, s.m = m, s.n = n, s.np1 = np1, s.npm1 = npm1, s.sp1 = sp1, s.spm1 = spm1;
  return s;
}

void InitialSurfaceSpec::validate() const {
  auto bad = [](const std::string& w) { throw Error(Errc::invalid_argument, w); };
  if (k < 2) bad("k must be >= 2");
  if (m < 1) bad("m must be >= 1");
  if (variant == Variant::M) {
    if (n1 < 1 || n2 < 1) bad("n1, n2 must be positive");
    if (std::gcd(n1, n2) != 1)
      bad("n1 = " + std::to_string(n1) + " and n2 = " + std::to_string(n2) +
          " must be relatively prime (a common factor belongs in m)");
    if (sigma != 0 && sigma != 1) bad("sigma must be 0 or 1");
  } else {
    if (n < 1 || np1 < 1 || npm1 < 1) bad("n, n'_1, n'_-1 must be positive");
    if (std::gcd(std::gcd(n, np1), npm1) != 1)
      bad("n, n'_1, n'_-1 must be relatively prime");
    if ((sp1 != 0 && sp1 != 1) || (spm1 != 0 && spm1 != 1)) bad("sigma' values must be 0 or 1");
  }
}

int InitialSurfaceSpec::expected_genus() const {
  if (variant == Variant::M) return k * (k - 1) * m * (n1 + n2) + 1;
  return 2 * k * k * m * (np1 + npm1) + 4 * k * m * n * (k - 1) + 1;
}

std::string InitialSurfaceSpec::label() const {
  std::ostringstream os;
  if (variant == Variant::M)
    os << "M(" << k << "," << m << "," << n1 << "," << n2 << "," << sigma << ")";
  else
    os << "N(" << k << "," << m << "," << n << "," << np1 << "," << npm1 << "," << sp1 << ","
       << spm1 << ")";
  return os.str();
}

// ------------------------------------------------------------ placement

Straightening desk_straightening(int k_C, int m, double T_u, const StraighteningPolicy& policy) {
  if (policy.verbatim) {
    Straightening st = verbatim_straightening(k_C, m);
    if (st.b > T_u) throw Error(Errc::m_too_small, "straightening window exceeds truncation");
    return st;
  }
  const double xc = TowerChart(k_C).corner_x();
  double a = std::max(std::min(m * kPi / 4.0 - policy.offset, T_u - policy.width), xc);
  double b = std::min(a + policy.width, T_u);
  if (b - a < policy.min_width) {
    std::ostringstream os;
    os << "straightening window [" << a << "," << b << "] narrower than " << policy.min_width
       << " (truncation " << T_u << ", corner " << xc << ")";
    throw Error(Errc::m_too_small, os.str());
  }
  return {a, b};
}

SphereIsometry n_tower_base_rotation() {
  return rotation_about_circle(circle_C(0, 0), kPi / 4)
      .compose(rotation_about_circle(circle_C(kPi / 2, kPi / 2), kPi / 4));
}

namespace {

SphereIsometry power(const SphereIsometry& g, int e) {
  SphereIsometry r;
  for (int i = 0; i < e; ++i) r = g.compose(r);
  return r;
}

}  // namespace

std::vector<TowerPlacement> tower_placements(const InitialSurfaceSpec& spec,
                                             const StraighteningPolicy& policy) {
  spec.validate();
  const int k = spec.k, m = spec.m;
  std::vector<TowerPlacement> out;
  const SphereIsometry swap = rotation_about_circle(circle_Cprime(k, 1), kPi);
  auto finish = [&](TowerPlacement T) {
    T.st = desk_straightening(T.k_C, m, T.T_u, policy);
    T.axis = GreatCircle::make(T.R.apply(circle_C1().e1), T.R.apply(circle_C1().e2));
    out.push_back(T);
  };
  if (spec.variant == InitialSurfaceSpec::Variant::M) {
    for (int j = 1; j <= 2; ++j) {
      TowerPlacement T;
      T.k_C = k;
      T.m_C = k * m * (j == 1 ? spec.n1 : spec.n2);
      T.T_u = T.m_C * kPi / 4.0;
      if (j == 2)
        T.R = power(rotation_about_circle(circle_C2(), kPi / k), spec.sigma).compose(swap);
      T.label = j == 1 ? "C1" : "C2";
      finish(T);
    }
  } else {
    for (int j = 0; j <= 1; ++j) {
      TowerPlacement T;
      T.k_C = k;
      T.m_C = 2 * k * m * spec.n;
      T.T_u = T.m_C * (kPi / 4.0 - kPi / (4.0 * k));
      if (j == 1) T.R = swap;
      T.label = j == 0 ? "C1" : "C2";
      finish(T);
    }
    const SphereIsometry P = n_tower_base_rotation();
    for (int j = 0; j < 2 * k; ++j) {
      const bool even = j % 2 == 0;
      const int np = even ? spec.np1 : spec.npm1;
      const int sg = even ? spec.sp1 : spec.spm1;
      TowerPlacement T;
      T.k_C = 2;
      T.m_C = 2 * k * m * np;
      T.T_u = T.m_C * kPi / (4.0 * k);
      const double t = kPi / (k * m * np);
      T.R = rotation_about_circle(circle_C1(), j * kPi / k)
                .compose(power(diag_rotation(t, t), sg))
                .compose(P);
      T.label = "C'" + std::to_string(j);
      finish(T);
    }
  }
  return out;
}

Vec3 straightened_point(const TowerChart& ch, const Straightening& st, cplx xi) {
  Vec3 p = ch.normalized(xi);
  if (p.x() > st.a) p.y() *= cutoff(st.b, st.a, p.x());
  return p;
}

Vec4 tower_surface_point(const TowerPlacement& T, const TowerChart& ch, const TowerGroupElement& g,
                         cplx xi) {
  Vec3 q = tower_act(T.k_C, g, straightened_point(ch, T.st, xi)) / double(T.m_C);
  return T.R.apply(phi(q));
}

// -------------------------------------------------------------- meshing

namespace {

// Structured grid on the fundamental piece in the xi chart.
struct PieceGrid {
  int n_u = 0, n_z = 0;
  std::vector<cplx> xi;   // (n_u+1)(n_z+1), index i + (n_u+1) j
  std::vector<Vec3> pos;  // straightened tower-unit positions
  cplx at(int i, int j) const { return xi[i + (n_u + 1) * j]; }
};

PieceGrid mesh_piece(const TowerPlacement& T, const TowerChart& ch, int n_z) {
  const int k = T.k_C;
  PieceGrid G;
  G.n_z = n_z;
  const double dZ = (kPi / 2) / n_z;

  std::vector<cplx> right(n_z + 1), left(n_z + 1);
  for (int j = 0; j <= n_z; ++j) right[j] = wing_solve(k, T.T_u / k, j * dZ / k).xi;
  right[0] = cplx(right[0].real(), 0.0);

  // Gamma_c, uniform in Z.
  const cplx corner = ch.xi_corner();
  left[0] = 0.0;
  left[n_z] = corner;
  for (int j = 1; j < n_z; ++j) {
    const double Zt = j * dZ;
    auto f = [&](double tau) { return ch.normalized(ch.xi_on_real_segment(tau)).z() - Zt; };
    boost::math::tools::eps_tolerance<double> tol(48);
    boost::uintmax_t it = 100;
    auto r = boost::math::tools::bisect(f, 0.0, 1.0, tol, it);
    left[j] = ch.xi_on_real_segment(0.5 * (r.first + r.second));
  }

  const double ua = right[0].real();
  const double uc = corner.real(), ut = right[n_z].real();
  int n_u = int(std::ceil(std::max(ua, ut - uc) / dZ));
  G.n_u = n_u = std::max(n_u, 2);

  auto bottom = [&](double s) { return cplx(s * ua, 0.0); };
  auto top = [&](double s) {
    if (s <= 0) return corner;
    if (s >= 1) return right[n_z];
    double u = uc + s * (ut - uc);
    return ch.xi_on_arc(-2.0 * std::asin(0.5 * std::exp(-u)));
  };

  G.xi.resize((n_u + 1) * (n_z + 1));
  G.pos.resize(G.xi.size());
  for (int j = 0; j <= n_z; ++j) {
    const double t = double(j) / n_z;
    for (int i = 0; i <= n_u; ++i) {
      const double s = double(i) / n_u;
      cplx x;
      if (i == 0)
        x = left[j];
      else if (i == n_u)
        x = right[j];
      else if (j == 0)
        x = bottom(s);
      else if (j == n_z)
        x = top(s);
      else
        x = (1 - t) * bottom(s) + t * top(s) + (1 - s) * left[j] + s * right[j] -
            ((1 - s) * (1 - t) * bottom(0) + s * (1 - t) * bottom(1) + (1 - s) * t * top(0) +
             s * t * top(1));
      G.xi[i + (n_u + 1) * j] = x;
      Vec3 p = straightened_point(ch, T.st, x);
      // Pin boundary coordinates that are exact by symmetry.
      if (j == 0) p.y() = p.z() = 0.0;
      if (j == n_z) p.z() = kPi / 2;
      if (i == n_u) p = Vec3(T.T_u, 0.0, j * dZ);
      G.pos[i + (n_u + 1) * j] = p;
    }
  }
  return G;
}

using CopyKey = std::tuple<int, int, int, int, int, int, int>;  // tower, i, j, e1, gi, e2, gj

std::tuple<int, int, int, int> tuple_of(const TowerGroupElement& g) {
  return {g.e1, g.i, g.e2, g.j};
}

struct SeamRegistry {
  struct Fiber {
    Vec4 ref;
    Eigen::Vector3d hopf;
    std::map<long long, int> slots;
  };
  std::vector<Fiber> fibers;
  double step = 0;
  long long n_slots = 0;

  static Eigen::Vector3d hopf(const Vec4& p) {
    cplx z1 = z1_of(p), z2 = z2_of(p);
    cplx w = 2.0 * z1 * std::conj(z2);
    return {w.real(), w.imag(), std::norm(z1) - std::norm(z2)};
  }

  // Returns a reference to the vertex slot for p, creating -1 placeholders.
  int& slot(const Vec4& p) {
    Eigen::Vector3d h = hopf(p);
    Fiber* F = nullptr;
    for (auto& f : fibers)
      if ((f.hopf - h).norm() < 1e-8) {
        F = &f;
        break;
      }
    if (!F) {
      fibers.push_back({p, h, {}});
      F = &fibers.back();
    }
    cplx ip = std::conj(z1_of(F->ref)) * z1_of(p) + std::conj(z2_of(F->ref)) * z2_of(p);
    double t = std::arg(ip);
    long long idx = std::llround(t / step);
    if (std::abs(t - idx * step) > 1e-7 || std::abs(std::abs(ip) - 1.0) > 1e-7) {
      std::ostringstream os;
      os << "seam vertex off the lattice: phase " << t << ", step " << step;
      throw Error(Errc::seam_mismatch, os.str());
    }
    idx = ((idx % n_slots) + n_slots) % n_slots;
    auto it = F->slots.emplace(idx, -1).first;
    return it->second;
  }
};

double min_triangle_angle_deg(const SurfaceMesh& mesh) {
  double best = 180.0;
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) {
      Vec4 u = mesh.vertices[t[(c + 1) % 3]] - mesh.vertices[t[c]];
      Vec4 v = mesh.vertices[t[(c + 2) % 3]] - mesh.vertices[t[c]];
      double a = std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
      best = std::min(best, a * 180.0 / kPi);
    }
  return best;
}

}  // namespace

PieceSamples fundamental_piece(const TowerPlacement& T, int n_z) {
  if (n_z < 1) throw Error(Errc::invalid_argument, "n_z must be positive");
  PieceGrid G = mesh_piece(T, TowerChart(T.k_C), n_z);
  return {G.n_u, G.n_z, G.xi};
}

AssembledSurface assemble(const InitialSurfaceSpec& spec, const AssemblyOptions& opt) {
  if (opt.resolution < 16) throw Error(Errc::invalid_argument, "resolution must be >= 16");
  AssembledSurface S;
  S.spec = spec;
  S.options = opt;
  S.towers = tower_placements(spec, opt.straightening);

  int L = 1;
  for (const auto& T : S.towers) L = std::lcm(L, T.m_C);
  const int zres = opt.resolution / 16;
  S.lattice_Q = 4 * zres * L;

  SeamRegistry seams;
  seams.step = kPi / (2.0 * S.lattice_Q);
  seams.n_slots = 4LL * S.lattice_Q;

  SurfaceMesh& M = S.mesh;
  std::map<CopyKey, int> index;

  for (int ti = 0; ti < int(S.towers.size()); ++ti) {
    const TowerPlacement& T = S.towers[ti];
    const int k = T.k_C;
    const TowerChart ch(k);
    const int n_z = 4 * zres * L / T.m_C;
    const PieceGrid G = mesh_piece(T, ch, n_z);
    const int n_u = G.n_u;
    const int jp = 2 * T.m_C;
    const auto group = tower_group(k, jp);

    const TowerGroupElement a{-1, 0, -1, 0}, b{1, 0, -1, 1}, c{-1, 1, 1, 0};
    std::vector<TowerGroupElement> origin_stab;
    for (const auto& h : group)
      if (h.j == 0) origin_stab.push_back(h);
    auto stabilizer = [&](int i, int j) -> std::vector<TowerGroupElement> {
      const TowerGroupElement e{};
      if (i == 0 && j == 0) return origin_stab;
      if (i == 0 && j == n_z) return {e, b, c, tower_compose(b, c)};
      if (j == 0) return {e, a};
      if (i == 0) return {e, c};
      if (j == n_z) return {e, b};
      return {e};
    };

    for (const auto& g : group) {
      const int det = g.e1 * g.e2;
      const bool flip = det != tower_parity(k, g);
      std::vector<int> vid((n_u + 1) * (n_z + 1));
      for (int j = 0; j <= n_z; ++j)
        for (int i = 0; i <= n_u; ++i) {
          const int l = i + (n_u + 1) * j;
          int* slot;
          if (i == n_u) {
            Vec4 p = T.R.apply(phi(tower_act(k, g, G.pos[l]) / double(T.m_C)));
            slot = &seams.slot(p);
          } else {
            TowerGroupElement best = tower_reduce(k, g, jp);
            for (const auto& h : stabilizer(i, j)) {
              TowerGroupElement gh = tower_reduce(k, tower_compose(g, h), jp);
              if (tuple_of(gh) < tuple_of(best)) best = gh;
            }
            slot = &index.emplace(CopyKey{ti, i, j, best.e1, best.i, best.e2, best.j}, -1)
                        .first->second;
          }
          if (*slot < 0) {
            *slot = int(M.vertices.size());
            Vec4 p = T.R.apply(phi(tower_act(k, g, G.pos[l]) / double(T.m_C)));
            M.vertices.push_back(p / p.norm());
            S.origin.push_back({ti, tower_reduce(k, g, jp), G.xi[l]});
          }
          vid[l] = *slot;
        }
      for (int j = 0; j < n_z; ++j)
        for (int i = 0; i < n_u; ++i) {
          const int l00 = i + (n_u + 1) * j, l10 = l00 + 1, l01 = l00 + n_u + 1, l11 = l01 + 1;
          std::array<std::array<int, 3>, 2> tris;
          if (std::abs(G.xi[l00] - G.xi[l11]) <= std::abs(G.xi[l10] - G.xi[l01]))
            tris = {{{vid[l00], vid[l10], vid[l11]}, {vid[l00], vid[l11], vid[l01]}}};
          else
            tris = {{{vid[l00], vid[l10], vid[l01]}, {vid[l10], vid[l11], vid[l01]}}};
          for (auto t : tris) {
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
            if (flip) std::swap(t[1], t[2]);
            M.triangles.push_back(t);
          }
        }
    }
  }

  const MeshAudit au = audit_mesh(M);
  if (!au.watertight) {
    std::ostringstream os;
    os << spec.label() << ": " << au.boundary_edges << " boundary and " << au.nonmanifold_edges
       << " non-manifold edges after stitching";
    throw Error(Errc::seam_mismatch, os.str());
  }
  if (!orient_consistently(M)) throw Error(Errc::seam_mismatch, "assembled mesh not orientable");
  compute_vertex_normals(M);

  // Global normal: at (1,0) it points toward (i,0).
  PointLocator4 loc(M.vertices, 1e-3);
  double d = 0;
  int v0 = loc.nearest(Vec4(1, 0, 0, 0), &d);
  if (v0 < 0 || d > 1e-9) throw Error(Errc::seam_mismatch, "(1,0) is not a mesh vertex");
  if (M.normals[v0].dot(Vec4(0, 1, 0, 0)) < 0) {
    for (auto& t : M.triangles) std::swap(t[1], t[2]);
    for (auto& n : M.normals) n = -n;
  }
  build_half_edges(M);
  S.edges = edge_lengths(M);
  S.min_angle_deg = min_triangle_angle_deg(M);
  region_decomposition(S);
  return S;
}

// ------------------------------------------------------------- symmetry

std::vector<SphereIsometry> surface_group(const InitialSurfaceSpec& spec) {
  return build_symmetry_group(
      spec.k, spec.m,
      spec.variant == InitialSurfaceSpec::Variant::M ? GroupKind::G : GroupKind::Gprime);
}

std::vector<int> vertex_permutation(const SurfaceMesh& mesh, const SphereIsometry& g,
                                    double tol) {
  EdgeStats es = edge_lengths(mesh);
  PointLocator4 loc(mesh.vertices, std::max(es.min * 0.5, 10 * tol));
  std::vector<int> perm(mesh.vertices.size(), -1);
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    double d;
    int w = loc.nearest(g.apply(mesh.vertices[v]), &d);
    if (w >= 0 && d <= tol) perm[v] = w;
  }
  return perm;
}

double one_sided_distance(const SurfaceMesh& from, const SphereIsometry& g, const SurfaceMesh& to) {
  EdgeStats es = edge_lengths(to);
  PointLocator4 ploc(to.vertices, std::max(es.min * 0.5, 1e-8));
  TriangleLocator4 tloc(to, es.max);
  double worst = 0;
  for (const auto& v : from.vertices) {
    Vec4 q = g.apply(v);
    double d;
    ploc.nearest(q, &d);
    if (d > 1e-9) d = std::min(d, tloc.distance(q));
    worst = std::max(worst, d);
  }
  return worst;
}

double symmetry_invariance(const SurfaceMesh& mesh, const std::vector<SphereIsometry>& group) {
  double worst = 0;
  for (const auto& g : group) worst = std::max(worst, one_sided_distance(mesh, g, mesh));
  return worst;
}

double symmetry_residual(const SurfaceMesh& mesh, const SphereIsometry& g) {
  return symmetry_invariance(mesh, {g});
}

int mesh_parity(const SurfaceMesh& mesh, const SphereIsometry& g, double tol) {
  auto perm = vertex_permutation(mesh, g);
  int sign = 0;
  for (size_t v = 0; v < perm.size(); ++v) {
    if (perm[v] < 0) return 0;
    double s = mesh.normals[perm[v]].dot(g.matrix * mesh.normals[v]);
    int sv = s > 1 - tol ? 1 : (s < -1 + tol ? -1 : 0);
    if (sv == 0 || (sign != 0 && sv != sign)) return 0;
    sign = sv;
  }
  return sign;
}

// -------------------------------------------------------------- regions

RegionStats region_decomposition(AssembledSurface& s) {
  RegionStats st;
  SurfaceMesh& M = s.mesh;
  const auto cfg = build_configuration(s.spec.k, s.spec.variant == InitialSurfaceSpec::Variant::M
                                                     ? Configuration::Kind::W
                                                     : Configuration::Kind::Wprime);
  std::vector<double> b_eff;
  for (const auto& T : s.towers) {
    st.tag_radius.push_back(T.st.a / T.m_C);
    const double xc = TowerChart(T.k_C).corner_x();
    b_eff.push_back(std::max(xc, std::min(s.options.region_b, T.st.a)));
  }
  M.tags.assign(M.vertices.size(), RegionTag{});
  st.covers = true;
  st.towers_disjoint = true;
  st.overlaps_adjacent = true;
  for (size_t v = 0; v < M.vertices.size(); ++v) {
    const Vec4& p = M.vertices[v];
    RegionTag tag;
    int hits = 0;
    for (size_t t = 0; t < s.towers.size(); ++t) {
      const auto& T = s.towers[t];
      double d = T.axis.distance(p);
      if (d < T.st.a / T.m_C) {
        ++hits;
        tag.kind = RegionTag::Kind::tower;
        tag.circle_id = int(t);
        tag.m_C = T.m_C;
        tag.k_C = T.k_C;
        tag.overlap = d > b_eff[t] / T.m_C;
      }
    }
    if (hits > 1) st.towers_disjoint = false;
    // Toral component: nearest torus, then the side of the cut circles.
    int best = 0;
    double bo = 1e9;
    for (size_t i = 0; i < cfg.tori.size(); ++i) {
      double o = std::abs(cfg.tori[i].offset(p));
      if (o < bo) bo = o, best = int(i);
    }
    const cplx z1 = z1_of(p), z2 = z2_of(p);
    const double beta = std::arg(z2 * std::conj(z1));
    const int k = s.spec.k;
    int piece;
    if (s.spec.variant == InitialSurfaceSpec::Variant::N && best == int(cfg.tori.size()) - 1)
      piece = int(std::floor(std::fmod(beta + 2 * kPi, 2 * kPi) / (kPi / k))) % (2 * k);
    else {
      const int wing = int(std::lround(beta / (kPi / k)) % (2 * k) + 2 * k) % (2 * k);
      const int half = wing >= k ? 1 : 0;
      int side = s.spec.variant == InitialSurfaceSpec::Variant::N && std::abs(z1) < std::abs(z2);
      piece = 2 * half + side;
    }
    tag.component_id = best * 4 * k + piece;
    if (tag.kind == RegionTag::Kind::tower) {
      ++st.tower_vertices;
      if (tag.overlap) {
        ++st.overlap_vertices;
        if (!cfg.tori[best].contains_circle(s.towers[tag.circle_id].axis, 1e-9))
          st.overlaps_adjacent = false;
      }
    } else {
      ++st.torus_vertices;
      tag.m_C = 0;
      tag.k_C = 0;
    }
    M.tags[v] = tag;
  }
  st.covers = st.tower_vertices + st.torus_vertices == M.vertices.size();
  return st;
}

// ------------------------------------------------------------- scaffold

double scaffold_residual(const AssembledSurface& s, int samples) {
  const auto sc = build_scaffolding(s.spec.k, s.spec.m,
                                    s.spec.variant == InitialSurfaceSpec::Variant::M
                                        ? Scaffolding::Kind::C
                                        : Scaffolding::Kind::Cprime);
  TriangleLocator4 loc(s.mesh, s.edges.max);
  double worst = 0;
  for (const auto& C : sc.circles)
    for (int i = 0; i < samples; ++i)
      worst = std::max(worst, loc.distance(C.at(2 * kPi * i / samples)));
  return worst;
}

// ------------------------------------------------------------ alignment

Alignment alignment_invariant(const AssembledSurface& s, const SphereIsometry& R) {
  const auto& sp = s.spec;
  if (sp.variant != InitialSurfaceSpec::Variant::M || sp.m % 2 != 0 || sp.n1 % 2 == 0 ||
      sp.n2 % 2 == 0)
    throw Error(Errc::invariant_undefined,
                "alignment is defined for M surfaces with m even and n1, n2 odd");
  const SurfaceMesh& M = s.mesh;
  std::vector<Vec4> pos(M.vertices.size()), nrm(M.vertices.size());
  for (size_t v = 0; v < pos.size(); ++v) {
    pos[v] = R.apply(M.vertices[v]);
    nrm[v] = R.matrix * M.normals[v];
  }
  PointLocator4 loc(pos, std::max(0.5 * s.edges.min, 1e-8));
  auto vertex_at = [&](const Vec4& p) {
    double d;
    int v = loc.nearest(p, &d);
    if (v < 0 || d > 1e-9)
      throw Error(Errc::invariant_undefined, "root of unity is not on the surface");
    return v;
  };
  const double orient = nrm[vertex_at(Vec4(1, 0, 0, 0))].dot(Vec4(0, 1, 0, 0)) > 0 ? 1.0 : -1.0;
  const int N = 2 * sp.k * sp.m;
  auto sign_at = [&](const Vec4& p) {
    Vec4 ip(-p[1], p[0], -p[3], p[2]);
    return orient * nrm[vertex_at(p)].dot(ip) > 0 ? 1 : -1;
  };
  std::vector<Vec4> on1, on2;
  std::vector<int> s1, s2;
  for (int j = 0; j < N; ++j) {
    double t = 2 * kPi * j / N;
    on1.push_back(c2_to_r4(std::polar(1.0, t), 0.0));
    on2.push_back(c2_to_r4(0.0, std::polar(1.0, t)));
    s1.push_back(sign_at(on1.back()));
    s2.push_back(sign_at(on2.back()));
  }
  const auto sc = build_scaffolding(sp.k, sp.m, Scaffolding::Kind::C);
  int value = 0;
  for (const auto& C : sc.circles)
    for (int a = 0; a < N; ++a) {
      if (C.distance(on1[a]) > 1e-9) continue;
      for (int b = 0; b < N; ++b) {
        if (C.distance(on2[b]) > 1e-9) continue;
        int v = s1[a] == s2[b] ? 1 : -1;
        if (value != 0 && v != value)
          throw Error(Errc::invariant_undefined, "alignment depends on the chosen arc");
        value = v;
      }
    }
  if (value == 0) throw Error(Errc::invariant_undefined, "no scaffold arc joins C1 and C2");
  return value > 0 ? Alignment::aligned : Alignment::antialigned;
}

}  // namespace desing
