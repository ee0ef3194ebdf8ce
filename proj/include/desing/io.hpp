#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "desing/mesh.hpp"

namespace desing {

// ---- mesh export ----

// Pole on S^3 farthest from the vertices, over a fixed deterministic candidate set.
Vec4 choose_pole(const SurfaceMesh& mesh);
// Stereographic projection from the pole onto its orthogonal 3-space.
Vec3 stereographic(const Vec4& p, const Vec4& pole);

// ASCII OBJ of the stereographic image; raw R^4 coordinates ride along as "#v4" comments.
void write_obj(const SurfaceMesh& mesh, const std::string& path,
               const std::optional<Vec4>& pole = std::nullopt,
               const std::vector<std::string>& header = {});

// Binary little-endian PLY with float32 x y z w and optional per-vertex H and |A|^2.
void write_ply(const SurfaceMesh& mesh, const std::string& path,
               const std::vector<double>* H = nullptr, const std::vector<double>* normSqA = nullptr);

struct PlyData {
  std::vector<std::array<float, 4>> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::string> extra_properties;
  std::vector<std::vector<float>> extra;  // per property, per vertex
};
PlyData read_ply(const std::string& path);

// ---- configuration ----

// key=value lines, '#' comments, surrounding blanks trimmed. Unknown keys are rejected.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::set<std::string>& allowed);
  static RunConfig load(const std::string& path, const std::set<std::string>& allowed);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  // Tolerances and other positive reals.
  double get_positive(const std::string& key, double fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// ---- reports ----

struct VerificationReport {
  std::string claim;
  std::string anchor;  // statement being checked, or "plumbing"
  std::string measured;
  std::string expected;
  bool pass = false;
  bool gating = true;
  double runtime = 0;  // seconds; excluded from JSON unless timing is requested
};

nlohmann::ordered_json to_json(const VerificationReport& r, bool timing = false);
nlohmann::ordered_json to_json(const std::vector<VerificationReport>& rs, bool timing = false);
// One "PASS|FAIL claim: measured (expected)" line.
std::string summary_line(const VerificationReport& r);

void write_json(const nlohmann::ordered_json& j, const std::string& path);

// Fixed-precision formatting so reports are byte-stable.
std::string fmt(double v, int digits = 6);

}  // namespace desing
