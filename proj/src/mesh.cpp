#include "desing/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "desing/error.hpp"

namespace desing {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey undirected(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Undirected edge -> list of half-edges traversing it.
std::map<EdgeKey, std::vector<int>> edge_table(const SurfaceMesh& mesh) {
  std::map<EdgeKey, std::vector<int>> tab;
  for (size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    for (int c = 0; c < 3; ++c) tab[undirected(t[c], t[(c + 1) % 3])].push_back(3 * int(f) + c);
  }
  return tab;
}

int he_from(const SurfaceMesh& mesh, int h) { return mesh.triangles[h / 3][h % 3]; }

double det3(double a, double b, double c, double d, double e, double f, double g, double h,
            double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

}  // namespace

MeshAudit audit_mesh(const SurfaceMesh& mesh) {
  MeshAudit a;
  auto tab = edge_table(mesh);
  a.V = mesh.vertices.size();
  a.F = mesh.triangles.size();
  a.E = tab.size();
  a.oriented = true;
  for (const auto& [e, hs] : tab) {
    if (hs.size() == 1) {
      ++a.boundary_edges;
    } else if (hs.size() > 2) {
      ++a.nonmanifold_edges;
      a.oriented = false;
    } else if (he_from(mesh, hs[0]) == he_from(mesh, hs[1])) {
      a.oriented = false;
    }
  }
  a.watertight = a.boundary_edges == 0 && a.nonmanifold_edges == 0;

  // Components over faces sharing an edge.
  std::vector<int> parent(a.F);
  for (size_t i = 0; i < a.F; ++i) parent[i] = int(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [e, hs] : tab)
    for (size_t i = 1; i < hs.size(); ++i) parent[find(hs[0] / 3)] = find(hs[i] / 3);
  for (size_t i = 0; i < a.F; ++i)
    if (find(int(i)) == int(i)) ++a.components;
  return a;
}

bool orient_consistently(SurfaceMesh& mesh) {
  auto tab = edge_table(mesh);
  const size_t F = mesh.triangles.size();
  // flip[f] = whether face f must be reversed.
  std::vector<int> flip(F, -1);
  auto directed = [&](int f, int a, int b) {
    // +1 if face f (after flip) traverses a->b, -1 if b->a.
    const auto& t = mesh.triangles[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] == a && t[(c + 1) % 3] == b) return flip[f] ? -1 : 1;
      if (t[c] == b && t[(c + 1) % 3] == a) return flip[f] ? 1 : -1;
    }
    return 0;
  };
  bool ok = true;
  for (size_t s = 0; s < F; ++s) {
    if (flip[s] != -1) continue;
    flip[s] = 0;
    std::queue<int> q;
    q.push(int(s));
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      const auto& t = mesh.triangles[f];
      for (int c = 0; c < 3; ++c) {
        int a = t[c], b = t[(c + 1) % 3];
        auto it = tab.find(undirected(a, b));
        if (it->second.size() != 2) continue;
        int g = it->second[0] / 3 == f ? it->second[1] / 3 : it->second[0] / 3;
        int df = directed(f, a, b);
        if (flip[g] == -1) {
          flip[g] = 0;
          if (directed(g, a, b) == df) flip[g] = 1;
          q.push(g);
        } else if (directed(g, a, b) == df) {
          ok = false;
        }
      }
    }
  }
  for (size_t f = 0; f < F; ++f)
    if (flip[f] == 1) std::swap(mesh.triangles[f][1], mesh.triangles[f][2]);
  return ok;
}

void build_half_edges(SurfaceMesh& mesh) {
  auto tab = edge_table(mesh);
  mesh.half_edges.twin.assign(3 * mesh.triangles.size(), -1);
  for (const auto& [e, hs] : tab) {
    if (hs.size() != 2 || he_from(mesh, hs[0]) == he_from(mesh, hs[1]))
      throw Error(Errc::non_watertight, "edge (" + std::to_string(e.first) + "," +
                                            std::to_string(e.second) + ") has " +
                                            std::to_string(hs.size()) + " incident faces");
    mesh.half_edges.twin[hs[0]] = hs[1];
    mesh.half_edges.twin[hs[1]] = hs[0];
  }
}

int euler_characteristic(const SurfaceMesh& mesh) {
  auto a = audit_mesh(mesh);
  return int(a.V) - int(a.E) + int(a.F);
}

int genus(const SurfaceMesh& mesh) {
  auto a = audit_mesh(mesh);
  if (!a.watertight)
    throw Error(Errc::non_watertight, std::to_string(a.boundary_edges) + " boundary and " +
                                          std::to_string(a.nonmanifold_edges) +
                                          " non-manifold edges");
  if (a.components != 1) throw Error(Errc::invalid_argument, "mesh is not connected");
  int chi = int(a.V) - int(a.E) + int(a.F);
  if ((2 - chi) % 2 != 0) throw Error(Errc::non_watertight, "odd Euler characteristic");
  return (2 - chi) / 2;
}

Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  // n_i = det(a, b, c, e_i), expanded along the last column.
  Vec4 n;
  for (int i = 0; i < 4; ++i) {
    int r[3], q = 0;
    for (int j = 0; j < 4; ++j)
      if (j != i) r[q++] = j;
    double m = det3(a[r[0]], b[r[0]], c[r[0]], a[r[1]], b[r[1]], c[r[1]], a[r[2]], b[r[2]],
                    c[r[2]]);
    n[i] = ((i % 2 == 0) ? -1.0 : 1.0) * m;
  }
  return n;
}

Vec4 face_normal(const SurfaceMesh& mesh, int f) {
  const auto& t = mesh.triangles[f];
  const Vec4& a = mesh.vertices[t[0]];
  const Vec4& b = mesh.vertices[t[1]];
  const Vec4& c = mesh.vertices[t[2]];
  Vec4 n = cross4(a + b + c, b - a, c - a);
  double len = n.norm();
  return len > 0 ? Vec4(n / len) : Vec4::Zero();
}

void compute_vertex_normals(SurfaceMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec4::Zero());
  for (size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    const Vec4& a = mesh.vertices[t[0]];
    const Vec4& b = mesh.vertices[t[1]];
    const Vec4& c = mesh.vertices[t[2]];
    // Magnitude ~ 3 x twice the area: area weighting for free.
    Vec4 n = cross4(a + b + c, b - a, c - a);
    for (int v : t) mesh.normals[v] += n;
  }
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec4& p = mesh.vertices[v];
    Vec4 n = mesh.normals[v] - mesh.normals[v].dot(p) * p;
    double len = n.norm();
    mesh.normals[v] = len > 0 ? Vec4(n / len) : Vec4::Zero();
  }
}

EdgeStats edge_lengths(const SurfaceMesh& mesh) {
  EdgeStats s;
  s.min = std::numeric_limits<double>::infinity();
  double sum = 0;
  size_t n = 0;
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      if (a > b) continue;  // each interior edge once in a closed oriented mesh
      double l = (mesh.vertices[a] - mesh.vertices[b]).norm();
      s.min = std::min(s.min, l);
      s.max = std::max(s.max, l);
      sum += l;
      ++n;
    }
  s.mean = n ? sum / double(n) : 0.0;
  if (!n) s.min = 0;
  return s;
}

// ---- spatial hashing ----

size_t PointLocator4::KeyHash::operator()(const Key& k) const noexcept {
  uint64_t h = 1469598103934665603ull;
  for (int x : k) h = (h ^ uint64_t(uint32_t(x))) * 1099511628211ull;
  return size_t(h);
}

size_t TriangleLocator4::KeyHash::operator()(const Key& k) const noexcept {
  return PointLocator4::KeyHash{}(k);
}

PointLocator4::PointLocator4(const std::vector<Vec4>& pts, double cell) : pts_(pts), cell_(cell) {
  if (!(cell > 0)) throw Error(Errc::invalid_argument, "cell size must be positive");
  for (size_t i = 0; i < pts.size(); ++i) grid_[key(pts[i])].push_back(int(i));
}

PointLocator4::Key PointLocator4::key(const Vec4& p) const {
  return {int(std::floor(p[0] / cell_)), int(std::floor(p[1] / cell_)),
          int(std::floor(p[2] / cell_)), int(std::floor(p[3] / cell_))};
}

int PointLocator4::nearest(const Vec4& q, double* dist) const {
  Key k0 = key(q);
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 81; ++d) {
    Key k = k0;
    int r = d;
    for (int c = 0; c < 4; ++c, r /= 3) k[c] += r % 3 - 1;
    auto it = grid_.find(k);
    if (it == grid_.end()) continue;
    for (int i : it->second) {
      double dd = (pts_[i] - q).squaredNorm();
      if (dd < bd) bd = dd, best = i;
    }
  }
  if (dist) *dist = best >= 0 ? std::sqrt(bd) : std::numeric_limits<double>::infinity();
  return best;
}

TriangleLocator4::TriangleLocator4(const SurfaceMesh& mesh, double cell)
    : mesh_(mesh), cell_(cell) {
  if (!(cell > 0)) throw Error(Errc::invalid_argument, "cell size must be positive");
  for (size_t f = 0; f < mesh.triangles.size(); ++f) {
    Vec4 lo = mesh.vertices[mesh.triangles[f][0]], hi = lo;
    for (int v : mesh.triangles[f]) {
      lo = lo.cwiseMin(mesh.vertices[v]);
      hi = hi.cwiseMax(mesh.vertices[v]);
    }
    Key a, b;
    for (int c = 0; c < 4; ++c) {
      a[c] = int(std::floor(lo[c] / cell_));
      b[c] = int(std::floor(hi[c] / cell_));
    }
    Key k;
    for (k[0] = a[0]; k[0] <= b[0]; ++k[0])
      for (k[1] = a[1]; k[1] <= b[1]; ++k[1])
        for (k[2] = a[2]; k[2] <= b[2]; ++k[2])
          for (k[3] = a[3]; k[3] <= b[3]; ++k[3]) grid_[k].push_back(int(f));
  }
}

std::vector<int> TriangleLocator4::candidates(const Vec4& lo, const Vec4& hi) const {
  Key a, b;
  for (int c = 0; c < 4; ++c) {
    a[c] = int(std::floor(lo[c] / cell_));
    b[c] = int(std::floor(hi[c] / cell_));
  }
  std::vector<int> out;
  Key k;
  for (k[0] = a[0]; k[0] <= b[0]; ++k[0])
    for (k[1] = a[1]; k[1] <= b[1]; ++k[1])
      for (k[2] = a[2]; k[2] <= b[2]; ++k[2])
        for (k[3] = a[3]; k[3] <= b[3]; ++k[3]) {
          auto it = grid_.find(k);
          if (it != grid_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double TriangleLocator4::distance(const Vec4& q) const {
  // Grow the search box until a candidate is found, then once more to be safe.
  for (double r = cell_; r < 8.0; r *= 2) {
    auto cand = candidates(q - Vec4::Constant(r), q + Vec4::Constant(r));
    double best = std::numeric_limits<double>::infinity();
    for (int f : cand) {
      const auto& t = mesh_.triangles[f];
      Vec4 c = closest_point_on_triangle(q, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                         mesh_.vertices[t[2]]);
      best = std::min(best, (c - q).norm());
    }
    if (best <= r) return best;
  }
  return std::numeric_limits<double>::infinity();
}

Vec4 closest_point_on_triangle(const Vec4& p, const Vec4& a, const Vec4& b, const Vec4& c) {
  // Voronoi-region walk; only dot products, so valid in any dimension.
  Vec4 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec4 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  Vec4 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  double denom = va + vb + vc;
  if (std::abs(denom) < 1e-300) return a;
  double v = vb / denom, w = vc / denom;
  return a + v * ab + w * ac;
}

// ---- embeddedness ----

namespace {

// Segment pq against triangle abc in R^3, closed on both.
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                           const Vec3& c, double eps) {
  Vec3 n = (b - a).cross(c - a);
  double dp = n.dot(p - a), dq = n.dot(q - a);
  double scale = n.norm() * std::max((q - p).norm(), (b - a).norm());
  if (std::abs(dp) <= eps * scale && std::abs(dq) <= eps * scale) return false;  // coplanar
  if ((dp > eps * scale && dq > eps * scale) || (dp < -eps * scale && dq < -eps * scale))
    return false;
  double t = dp / (dp - dq);
  Vec3 x = p + t * (q - p);
  double s = n.squaredNorm();
  double u = n.dot((b - a).cross(x - a)) / s;
  double v = n.dot((c - b).cross(x - b)) / s;
  double w = n.dot((a - c).cross(x - c)) / s;
  return u >= -eps && v >= -eps && w >= -eps;
}

bool coplanar_overlap(const std::array<Vec3, 3>& A, const std::array<Vec3, 3>& B, const Vec3& n) {
  // Drop the dominant axis and intersect in 2D.
  int ax = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(n[c]) > std::abs(n[ax])) ax = c;
  int i0 = (ax + 1) % 3, i1 = (ax + 2) % 3;
  auto P = [&](const Vec3& v) { return Vec2(v[i0], v[i1]); };
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  };
  auto inside = [&](const std::array<Vec3, 3>& T, const Vec2& x) {
    double o0 = orient(P(T[0]), P(T[1]), x), o1 = orient(P(T[1]), P(T[2]), x),
           o2 = orient(P(T[2]), P(T[0]), x);
    return (o0 > 0 && o1 > 0 && o2 > 0) || (o0 < 0 && o1 < 0 && o2 < 0);
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vec2 a = P(A[i]), b = P(A[(i + 1) % 3]), c = P(B[j]), d = P(B[(j + 1) % 3]);
      double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a),
             o4 = orient(c, d, b);
      if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    }
  Vec2 ca = (P(A[0]) + P(A[1]) + P(A[2])) / 3, cb = (P(B[0]) + P(B[1]) + P(B[2])) / 3;
  return inside(B, ca) || inside(A, cb);
}

}  // namespace

EmbeddednessReport embeddedness_check(const SurfaceMesh& mesh) {
  EmbeddednessReport rep;
  const size_t F = mesh.triangles.size();
  if (F == 0) return rep;
  auto es = edge_lengths(mesh);
  double h = std::max(es.max, 1e-6);

  std::vector<char> bad(F, 0);
  for (size_t f = 0; f < F; ++f) {
    const auto& t = mesh.triangles[f];
    Vec4 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    double l = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    double area2 = cross4(a + b + c, b - a, c - a).norm() / 3.0;
    if (!(l > 0) || area2 < 1e-10 * l * l || !std::isfinite(area2)) {
      bad[f] = 1;
      rep.degenerate.push_back(int(f));
    }
  }

  TriangleLocator4 loc(mesh, h);
  for (size_t f = 0; f < F; ++f) {
    if (bad[f]) continue;
    const auto& t = mesh.triangles[f];
    Vec4 lo = mesh.vertices[t[0]], hi = lo;
    for (int v : t) {
      lo = lo.cwiseMin(mesh.vertices[v]);
      hi = hi.cwiseMax(mesh.vertices[v]);
    }
    for (int g : loc.candidates(lo, hi)) {
      if (g <= int(f) || bad[g]) continue;
      const auto& s = mesh.triangles[g];
      bool share = false;
      for (int x : t)
        for (int y : s) share |= x == y;
      if (share) continue;
      Vec4 glo = mesh.vertices[s[0]], ghi = glo;
      for (int v : s) {
        glo = glo.cwiseMin(mesh.vertices[v]);
        ghi = ghi.cwiseMax(mesh.vertices[v]);
      }
      if ((glo.array() > hi.array() + 1e-12).any() || (ghi.array() < lo.array() - 1e-12).any())
        continue;
      // Gnomonic projection onto the tangent space at the common centroid.
      Vec4 cen = Vec4::Zero();
      for (int v : t) cen += mesh.vertices[v];
      for (int v : s) cen += mesh.vertices[v];
      cen.normalize();
      Eigen::Matrix4d Q = Eigen::Matrix4d::Identity() - cen * cen.transpose();
      Eigen::JacobiSVD<Eigen::Matrix4d> svd(Q, Eigen::ComputeFullU);
      Eigen::Matrix<double, 4, 3> basis = svd.matrixU().leftCols<3>();
      auto proj = [&](int v) {
        const Vec4& p = mesh.vertices[v];
        return Vec3(basis.transpose() * (p / p.dot(cen)));
      };
      std::array<Vec3, 3> A{proj(t[0]), proj(t[1]), proj(t[2])};
      std::array<Vec3, 3> B{proj(s[0]), proj(s[1]), proj(s[2])};
      const double eps = 1e-12;
      bool hit = false;
      for (int i = 0; i < 3 && !hit; ++i) {
        hit |= segment_hits_triangle(A[i], A[(i + 1) % 3], B[0], B[1], B[2], eps);
        hit |= segment_hits_triangle(B[i], B[(i + 1) % 3], A[0], A[1], A[2], eps);
      }
      if (!hit) {
        Vec3 na = (A[1] - A[0]).cross(A[2] - A[0]);
        double sc = na.norm() * h;
        bool cop = true;
        for (const auto& v : B) cop &= std::abs(na.dot(v - A[0])) <= 1e-9 * sc;
        if (cop) hit = coplanar_overlap(A, B, na);
      }
      if (hit) rep.intersecting.push_back({int(f), g});
    }
  }
  return rep;
}

SurfaceMesh periodic_grid_mesh(int n_s, int n_t, const std::function<Vec4(double, double)>& f) {
  if (n_s < 3 || n_t < 3) throw Error(Errc::invalid_argument, "periodic grid needs n >= 3");
  SurfaceMesh M;
  for (int j = 0; j < n_t; ++j)
    for (int i = 0; i < n_s; ++i) M.vertices.push_back(f(2 * kPi * i / n_s, 2 * kPi * j / n_t));
  auto id = [&](int i, int j) { return (i % n_s) + n_s * (j % n_t); };
  for (int j = 0; j < n_t; ++j)
    for (int i = 0; i < n_s; ++i) {
      M.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      M.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  compute_vertex_normals(M);
  build_half_edges(M);
  return M;
}

}  // namespace desing
