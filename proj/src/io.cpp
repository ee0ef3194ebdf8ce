#include "desing/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "desing/error.hpp"

namespace desing {

static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");

// ------------------------------------------------------------------ OBJ

Vec4 choose_pole(const SurfaceMesh& mesh) {
  // Candidates: coordinate axes and their negatives, then the 16 (+-1,+-1,+-1,+-1)/2.
  std::vector<Vec4> cand;
  for (int i = 0; i < 4; ++i)
    for (double s : {1.0, -1.0}) {
      Vec4 e = Vec4::Zero();
      e[i] = s;
      cand.push_back(e);
    }
  for (int m = 0; m < 16; ++m)
    cand.emplace_back(m & 1 ? -0.5 : 0.5, m & 2 ? -0.5 : 0.5, m & 4 ? -0.5 : 0.5, m & 8 ? -0.5 : 0.5);
  // Symmetric surfaces pass through all of those; add fixed-seed random directions.
  std::mt19937 rng(7);
  std::normal_distribution<double> N;
  for (int i = 0; i < 256; ++i) {
    Vec4 c(N(rng), N(rng), N(rng), N(rng));
    cand.push_back(c.normalized());
  }
  Vec4 best = cand.front();
  double best_gap = -1;
  for (const Vec4& c : cand) {
    double gap = 2.0;
    for (const Vec4& v : mesh.vertices) gap = std::min(gap, (v - c).norm());
    if (gap > best_gap + 1e-12) best_gap = gap, best = c;
  }
  return best;
}

Vec3 stereographic(const Vec4& p, const Vec4& pole) {
  // Orthonormal basis of the complement of the pole.
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity() - pole * pole.transpose();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullU);
  const double d = 1.0 - p.dot(pole);
  if (d < 1e-12) throw Error(Errc::invalid_argument, "point coincides with the projection pole");
  Vec4 q = (p - p.dot(pole) * pole) / d;
  return Vec3(svd.matrixU().col(0).dot(q), svd.matrixU().col(1).dot(q), svd.matrixU().col(2).dot(q));
}

void write_obj(const SurfaceMesh& mesh, const std::string& path, const std::optional<Vec4>& pole,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  const Vec4 P = pole ? *pole : choose_pole(mesh);
  out << std::setprecision(12);
  for (const auto& h : header) out << "# " << h << "\n";
  out << "# stereographic pole " << P[0] << " " << P[1] << " " << P[2] << " " << P[3] << "\n";
  for (const Vec4& v : mesh.vertices) {
    Vec3 q = stereographic(v, P);
    out << "#v4 " << v[0] << " " << v[1] << " " << v[2] << " " << v[3] << "\n";
    out << "v " << q[0] << " " << q[1] << " " << q[2] << "\n";
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

// ------------------------------------------------------------------ PLY

void write_ply(const SurfaceMesh& mesh, const std::string& path, const std::vector<double>* H,
               const std::vector<double>* normSqA) {
  const size_t V = mesh.vertices.size();
  if ((H && H->size() != V) || (normSqA && normSqA->size() != V))
    throw Error(Errc::invalid_argument, "per-vertex property size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << V << "\n";
  for (const char* c : {"x", "y", "z", "w"}) out << "property float " << c << "\n";
  if (H) out << "property float H\n";
  if (normSqA) out << "property float normSqA\n";
  out << "element face " << mesh.triangles.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  auto put = [&](auto x) { out.write(reinterpret_cast<const char*>(&x), sizeof(x)); };
  for (size_t v = 0; v < V; ++v) {
    for (int i = 0; i < 4; ++i) put(float(mesh.vertices[v][i]));
    if (H) put(float((*H)[v]));
    if (normSqA) put(float((*normSqA)[v]));
  }
  for (const auto& t : mesh.triangles) {
    put(uint8_t(3));
    for (int i = 0; i < 3; ++i) put(int32_t(t[i]));
  }
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

PlyData read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::string line;
  size_t nv = 0, nf = 0;
  std::vector<std::string> props;
  bool in_vertex = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string w;
    ls >> w;
    if (w == "element") {
      std::string what;
      size_t n;
      ls >> what >> n;
      in_vertex = what == "vertex";
      (in_vertex ? nv : nf) = n;
    } else if (w == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      if (type != "float") throw Error(Errc::io_error, "unsupported vertex property type " + type);
      props.push_back(name);
    } else if (w == "format" && line.find("binary_little_endian") == std::string::npos) {
      throw Error(Errc::io_error, "only binary little-endian PLY is supported");
    } else if (w == "end_header") {
      break;
    }
  }
  if (props.size() < 4) throw Error(Errc::io_error, "PLY lacks the four position properties");
  PlyData D;
  D.extra_properties.assign(props.begin() + 4, props.end());
  D.extra.assign(D.extra_properties.size(), std::vector<float>(nv));
  auto get = [&](auto& x) {
    in.read(reinterpret_cast<char*>(&x), sizeof(x));
    if (!in) throw Error(Errc::io_error, "truncated PLY body");
  };
  D.vertices.resize(nv);
  for (size_t v = 0; v < nv; ++v) {
    for (int i = 0; i < 4; ++i) get(D.vertices[v][i]);
    for (auto& e : D.extra) get(e[v]);
  }
  D.faces.resize(nf);
  for (size_t f = 0; f < nf; ++f) {
    uint8_t c;
    get(c);
    if (c != 3) throw Error(Errc::io_error, "non-triangular face");
    for (int i = 0; i < 3; ++i) {
      int32_t x;
      get(x);
      D.faces[f][i] = x;
    }
  }
  return D;
}

// --------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::set<std::string>& allowed) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_argument, "config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!allowed.count(key))
      throw Error(Errc::invalid_argument, "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), allowed);
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "config key '" + key + "' expects an integer");
  }
}

double RunConfig::get_positive(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0;
  try {
    size_t used = 0;
    v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "config key '" + key + "' expects a number");
  }
  if (!(v > 0)) throw Error(Errc::invalid_argument, "config key '" + key + "' must be positive");
  return v;
}

std::vector<int> RunConfig::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "config key '" + key + "' expects a comma-separated integer list");
    }
  }
  return out;
}

// -------------------------------------------------------------- reports

std::string fmt(double v, int digits) {
  std::ostringstream o;
  o << std::setprecision(digits) << v;
  return o.str();
}

nlohmann::ordered_json to_json(const VerificationReport& r, bool timing) {
  nlohmann::ordered_json j;
  j["claim"] = r.claim;
  j["anchor"] = r.anchor;
  j["measured"] = r.measured;
  j["expected"] = r.expected;
  j["pass"] = r.pass;
  j["gating"] = r.gating;
  if (timing) j["runtime_s"] = r.runtime;
  return j;
}

nlohmann::ordered_json to_json(const std::vector<VerificationReport>& rs, bool timing) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rs) arr.push_back(to_json(r, timing));
  return arr;
}

std::string summary_line(const VerificationReport& r) {
  std::string s = r.pass ? "PASS " : "FAIL ";
  s += r.claim + ": " + r.measured + " (expected " + r.expected + ")";
  if (!r.gating) s += " [non-gating]";
  return s;
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

}  // namespace desing
