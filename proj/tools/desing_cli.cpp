// desing: command-line driver for towers, initial surfaces, spectral checks and the acceptance suite.
//
// Exit codes: 0 all rows pass, 1 some gating row fails, 2 invalid input, 3 internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "desing/acceptance.hpp"
#include "desing/assembly.hpp"
#include "desing/curvature.hpp"
#include "desing/error.hpp"
#include "desing/io.hpp"
#include "desing/spectral.hpp"
#include "desing/tower.hpp"

using namespace desing;

namespace {

const std::set<std::string> kConfigKeys = {
    "k",    "m",     "n1",   "n2",  "sigma", "n",     "np1",   "npm1", "sp1",     "spm1",
    "res",  "out",   "json", "seed", "eps",  "X",     "Y",     "modes", "iters",  "suite",
    "criteria", "timing", "format", "ms", "lmax"};

// Flag values that were given explicitly win over the config file, which wins over defaults.
struct Params {
  RunConfig file;
  std::map<std::string, CLI::Option*> flags;

  bool given(const std::string& key) const {
    auto it = flags.find(key);
    return it != flags.end() && it->second->count() > 0;
  }
  template <class T>
  void resolve(const std::string& key, T& value) const {
    if (given(key) || !file.has(key)) return;
    if constexpr (std::is_same_v<T, int>) value = file.get_int(key, value);
    else if constexpr (std::is_same_v<T, double>) value = file.get_positive(key, value);
    else if constexpr (std::is_same_v<T, bool>) value = file.get(key, "false") == "true";
    else if constexpr (std::is_same_v<T, std::vector<int>>) value = file.get_int_list(key, value);
    else value = file.get(key, value);
  }
};

struct Shared {
  std::string config, json, out;
  int res = 0;
  unsigned seed = 20240517;
  bool timing = false;
};

int finish(const std::vector<VerificationReport>& rows, const nlohmann::ordered_json& extra,
           const Shared& sh) {
  for (const auto& r : rows) std::cout << summary_line(r) << "\n";
  if (!sh.json.empty()) {
    nlohmann::ordered_json j;
    if (!extra.is_null()) j["data"] = extra;
    j["reports"] = to_json(rows, sh.timing);
    write_json(j, sh.json);
  }
  return acceptance_exit_code(rows);
}

VerificationReport make_row(const std::string& claim, const std::string& anchor, bool pass,
                            const std::string& measured, const std::string& expected) {
  VerificationReport r;
  r.claim = claim, r.anchor = anchor, r.pass = pass, r.measured = measured, r.expected = expected;
  return r;
}

void write_tower_obj(const TowerPatch& P, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  out << std::setprecision(12) << "# Karcher-Scherk tower k=" << P.k << "\n";
  // Samples come in (i, j) order; the puncture at the last corner is omitted.
  const bool punctured = P.w.size() < size_t((P.n_r + 1) * (P.n_theta + 1));
  std::map<std::pair<int, int>, int> id;
  size_t n = 0;
  for (int i = 0; i <= P.n_r; ++i)
    for (int j = 0; j <= P.n_theta; ++j) {
      if (punctured && i == P.n_r && j == P.n_theta) continue;
      id[{i, j}] = int(n);
      const Vec3& p = P.points[n++];
      out << "v " << p[0] << " " << p[1] << " " << p[2] << "\n";
    }
  for (int i = 0; i < P.n_r; ++i)
    for (int j = 0; j < P.n_theta; ++j) {
      auto a = id.find({i, j}), b = id.find({i + 1, j}), c = id.find({i + 1, j + 1}), d = id.find({i, j + 1});
      if (a != id.end() && b != id.end() && c != id.end())
        out << "f " << a->second + 1 << " " << b->second + 1 << " " << c->second + 1 << "\n";
      if (a != id.end() && c != id.end() && d != id.end())
        out << "f " << a->second + 1 << " " << c->second + 1 << " " << d->second + 1 << "\n";
    }
}

// ------------------------------------------------------------ commands

int cmd_tower(Params& p, Shared& sh, int k, int m) {
  p.resolve("k", k);
  p.resolve("m", m);
  if (sh.res == 0) sh.res = 128;
  if (k < 2) throw Error(Errc::invalid_argument, "tower requires k >= 2");
  std::vector<VerificationReport> rows;
  nlohmann::ordered_json data;
  data["k"] = k;

  TowerChart ch(k);
  TowerPatch P = build_tower_patch(k, true, sh.res, sh.res / 2);
  double worst = 0;
  for (const cplx& w : P.w) {
    FundamentalForms F = forms_from_jet(lift(ch.normalized_jet(ch.xi_of_w(w))), Ambient::euclidean);
    if (F.normSqA > 0) worst = std::max(worst, std::abs(F.H) / std::sqrt(F.normSqA));
  }
  rows.push_back(make_row("tower.minimality", "Karcher-Scherk tower: Weierstrass representation is minimal",
                          worst <= 1e-6, fmt(worst, 3), "<= 1e-06"));
  const double s0 = wing_onset_radius(k);
  const double slope = wing_decay_fit(k, s0, s0 + 5);
  rows.push_back(make_row("tower.wing_decay", "tower wings: exponential decay of the wing graph",
                          slope >= -1.2 * k && slope <= -0.8 * k, fmt(slope, 5),
                          "[" + fmt(-1.2 * k) + ", " + fmt(-0.8 * k) + "]"));

  // Generator residuals on a coarse cloud of group images.
  TowerPatch C = build_tower_patch(k, true, 24, 12);
  std::vector<Vec3> cloud;
  for (const auto& g : tower_group(k, 6))
    for (const auto& q0 : C.points) {
      Vec3 q = tower_act(k, g, q0);
      q.z() -= 2 * kPi;
      if (q.norm() < 6.0) cloud.push_back(q);
    }
  double sym = 0;
  for (const auto& e : C.generators)
    for (size_t n = 0; n < cloud.size(); n += 7) {
      Vec3 q = e.apply(cloud[n]);
      if (q.norm() >= 4.0) continue;
      double d = 1e9;
      for (const auto& c : cloud) d = std::min(d, (c - q).norm());
      sym = std::max(sym, d);
    }
  rows.push_back(make_row("tower.symmetry", "tower symmetry group", sym < 1e-9, fmt(sym, 3), "< 1e-09"));

  if (m > 0) {
    Straightening st = verbatim_straightening(k, m);
    data["m"] = m;
    data["a_m"] = st.a;
    data["b_m"] = st.b;
    std::cout << "a_m = " << fmt(st.a, 12) << ", b_m = " << fmt(st.b, 12) << "\n";
    for (auto& q : P.points) q = apply_straightening(k, st, q);
  }
  if (!sh.out.empty()) {
    write_tower_obj(P, sh.out + ".obj");
    SurfaceMesh M;
    for (const auto& q : P.points) M.vertices.emplace_back(q[0], q[1], q[2], 0.0);
    write_ply(M, sh.out + ".ply");
  }
  return finish(rows, data, sh);
}

struct SpecFlags {
  std::string variant = "M";
  int k = 2, m = 1, n1 = 1, n2 = 1, sigma = 0, n = 1, np1 = 1, npm1 = 1, sp1 = 0, spm1 = 0;

  void add(CLI::App* app, Params& p) {
    app->add_option("variant", variant, "M or N")->check(CLI::IsMember({"M", "N"}));
    for (auto [name, ref] : std::initializer_list<std::pair<const char*, int*>>{
             {"k", &k}, {"m", &m}, {"n1", &n1}, {"n2", &n2}, {"sigma", &sigma}, {"n", &n},
             {"np1", &np1}, {"npm1", &npm1}, {"sp1", &sp1}, {"spm1", &spm1}})
      p.flags[name] = app->add_option(std::string("--") + name, *ref);
  }
  InitialSurfaceSpec spec(const Params& p) {
    for (auto [name, ref] : std::initializer_list<std::pair<const char*, int*>>{
             {"k", &k}, {"m", &m}, {"n1", &n1}, {"n2", &n2}, {"sigma", &sigma}, {"n", &n},
             {"np1", &np1}, {"npm1", &npm1}, {"sp1", &sp1}, {"spm1", &spm1}})
      p.resolve(name, *ref);
    InitialSurfaceSpec s = variant == "M" ? InitialSurfaceSpec::M(k, m, n1, n2, sigma)
                                          : InitialSurfaceSpec::N(k, m, n, np1, npm1, sp1, spm1);
    s.validate();
    return s;
  }
};

int cmd_surface(Params& p, Shared& sh, SpecFlags& sf) {
  InitialSurfaceSpec spec = sf.spec(p);
  AssemblyOptions o;
  o.resolution = sh.res ? sh.res : 32;
  AssembledSurface S = assemble(spec, o);
  std::vector<VerificationReport> rows;
  const int g = genus(S.mesh), want = spec.expected_genus();
  rows.push_back(make_row("surface.genus", "initial surfaces: genus formulas for M and N", g == want,
                          std::to_string(g), std::to_string(want)));
  const double sc = scaffold_residual(S, 500);
  rows.push_back(make_row("surface.scaffold", "scaffolding circles lie on the surface", sc <= S.h() * S.h(),
                          fmt(sc, 3), "<= h^2 = " + fmt(S.h() * S.h(), 3)));
  const double sym = symmetry_invariance(S.mesh, surface_group(spec));
  rows.push_back(make_row("surface.symmetry", "symmetry groups of the scaffolding and their identities",
                          sym <= 2 * S.h(), fmt(sym, 3), "<= 2h = " + fmt(2 * S.h(), 3)));
  const auto emb = embeddedness_check(S.mesh);
  rows.push_back(make_row("surface.embedded", "initial surfaces are embedded", emb.intersecting.empty(),
                          std::to_string(emb.intersecting.size()) + " intersecting pairs", "0"));
  RegionStats rs = region_decomposition(S);
  rows.push_back(make_row("surface.regions", "extended standard regions cover the surface",
                          rs.covers && rs.towers_disjoint, std::string(rs.covers ? "covers" : "gap") +
                              (rs.towers_disjoint ? ", towers disjoint" : ", towers overlap"),
                          "covers, towers disjoint"));
  nlohmann::ordered_json data;
  data["spec"] = spec.label();
  data["resolution"] = o.resolution;
  data["vertices"] = S.mesh.vertices.size();
  data["triangles"] = S.mesh.triangles.size();
  data["h"] = S.h();
  data["min_angle_deg"] = S.min_angle_deg;
  data["tower_vertices"] = rs.tower_vertices;
  data["torus_vertices"] = rs.torus_vertices;
  if (!sh.out.empty()) {
    write_obj(S.mesh, sh.out + ".obj", std::nullopt, {spec.label()});
    std::vector<double> H(S.mesh.vertices.size());
    Eigen::VectorXd Hd = discrete_mean_curvature(S.mesh), A = surface_normSqA(S);
    std::vector<double> Av(A.data(), A.data() + A.size());
    for (size_t i = 0; i < H.size(); ++i) H[i] = Hd[i];
    write_ply(S.mesh, sh.out + ".ply", &H, &Av);
  }
  return finish(rows, data, sh);
}

int cmd_spectral(Params& p, Shared& sh, const std::string& which, int k, double eps, double X,
                 double Y, int lmax) {
  p.resolve("k", k);
  p.resolve("eps", eps);
  p.resolve("X", X);
  p.resolve("Y", Y);
  p.resolve("lmax", lmax);
  std::vector<VerificationReport> rows;
  nlohmann::ordered_json data;
  if (which == "hemisphere") {
    HemisphereCounts H = hemisphere_counts(k, eps, lmax);
    const bool ok = H.dirichlet.nullity == 1 && H.dirichlet.negatives == 0 && H.neumann.nullity == 0 &&
                    H.neumann.negatives == 1;
    auto pair = [](const BoundaryCounts& b) {
      return "(" + std::to_string(b.nullity) + "," + std::to_string(b.negatives) + ")";
    };
    rows.push_back(make_row("spectral.hemisphere_counts", "hemisphere lemma: Dirichlet and Neumann counts", ok,
                            "Dirichlet " + pair(H.dirichlet) + ", Neumann " + pair(H.neumann),
                            "Dirichlet (1,0), Neumann (0,1)"));
    data["k"] = k;
    data["eps"] = eps;
    for (const auto& md : H.modes)
      data["modes"].push_back({{"ell", md.ell}, {"multiplicity", md.multiplicity},
                               {"dirichlet_negatives", md.dirichlet_neg}, {"neumann_negatives", md.neumann_neg},
                               {"dirichlet_null", md.dirichlet_null}, {"neumann_null", md.neumann_null}});
    data["warnings"] = H.warnings;
  } else if (which == "neumann") {
    NeumannRoot R = neumann_negative_root(k, eps);
    rows.push_back(make_row("spectral.neumann_root", "hemisphere lemma: the Neumann root",
                            R.sign_changes == 1 && std::abs(R.lambda - R.secant) < 1e-10,
                            "lambda* = " + fmt(R.lambda, 12) + ", " + std::to_string(R.sign_changes) +
                                " sign change(s)",
                            "unique root, k - 1 = " + std::to_string(k - 1) + " as eps -> 0"));
    data["lambda"] = R.lambda;
    data["secant"] = R.secant;
  } else if (which == "strip") {
    StripProblem P;
    P.X = X, P.Y = Y;
    const double A = 0.4 * X * kPi, B = 0.6 * X * kPi;
    P.f = [=](double x, double y) {
      if (x <= A || x >= B) return 0.0;
      const double t = (x - A) * (B - x) / ((B - A) * (B - A));
      return std::exp(-0.25 / t) * (std::sin(y / Y) + 0.3 * std::sin(3 * y / Y));
    };
    P.nx = std::max(400, int(100 * X));
    StripSolution G = strip_solve(P), F = strip_solve_fd(P);
    const double agree = (G.u - F.u).cwiseAbs().maxCoeff() / F.sup();
    rows.push_back(make_row("spectral.strip_oracle", "Poisson problem on the flat strip: decay and uniform bound",
                            agree <= 1e-3, fmt(agree, 3), "<= 1e-03"));
    const double rate = strip_decay_rate(G, 1.0, A - 1.0);
    rows.push_back(make_row("spectral.strip_decay", "Poisson problem on the flat strip: decay and uniform bound",
                            rate >= 1 / Y - 0.1, fmt(rate, 4), ">= " + fmt(1 / Y - 0.1)));
    data["sup"] = G.sup();
  } else {  // flat-torus
    FlatTorusReport R = flat_torus_kernel_report(100);
    bool ok = R.kernel_residual <= 1e-12;
    for (const auto& L : R.lists) {
      ok = ok && !L.contains_four;
      data["lists"].push_back({{"label", L.label}, {"contains_four", L.contains_four},
                               {"first", std::vector<int>(L.values.begin(),
                                                          L.values.begin() + std::min<size_t>(8, L.values.size()))}});
    }
    rows.push_back(make_row("spectral.flat_torus_kernel", "flat torus: Delta + 4 has no odd kernel", ok,
                            fmt(R.kernel_residual, 3), "<= 1e-12, 4 absent"));
  }
  return finish(rows, data, sh);
}

int cmd_verify(Params& p, Shared& sh, std::string suite, std::vector<int> criteria) {
  p.resolve("suite", suite);
  p.resolve("criteria", criteria);
  if (suite != "acceptance") throw Error(Errc::invalid_argument, "unknown suite '" + suite + "'");
  AcceptanceOptions o;
  o.seed = sh.seed;
  if (sh.res) o.resolution = sh.res;
  if (criteria.empty())
    for (int i = 1; i <= 12; ++i) criteria.push_back(i);
  std::vector<VerificationReport> rows;
  for (int i : criteria) {
    rows.push_back(run_criterion(i, o));
    std::cout << summary_line(rows.back()) << "\n" << std::flush;
  }
  if (!sh.json.empty()) {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["reports"] = to_json(rows, sh.timing);
    write_json(j, sh.json);
  }
  return acceptance_exit_code(rows);
}

int cmd_perturb(Params& p, Shared& sh, SpecFlags& sf, int iters) {
  p.resolve("iters", iters);
  InitialSurfaceSpec spec = sf.spec(p);
  AssemblyOptions o;
  o.resolution = sh.res ? sh.res : 16;
  AssembledSurface S = assemble(spec, o);
  PerturbResult P = perturb_to_minimal(S, iters);
  VerificationReport r = make_row("curvature.perturbation", "plumbing", P.success,
                                  fmt(P.sup_H.front(), 4) + " -> " + fmt(P.sup_H.back(), 4),
                                  "reduction >= 5x");
  r.gating = false;
  nlohmann::ordered_json data;
  data["spec"] = spec.label();
  data["sup_H"] = P.sup_H;
  data["u_inf"] = P.u_inf;
  data["injectivity_bound"] = P.injectivity_bound;
  data["diagnostic"] = P.diagnostic;
  finish({r}, data, sh);
  return P.success ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desingularization toolkit: towers, initial surfaces in S^3, spectral checks"};
  app.require_subcommand(0, 1);
  Shared sh;
  Params params;
  bool list_claims = false;
  app.add_flag("--list-claims", list_claims, "print the claim to anchor map and exit");
  auto add_shared = [&](CLI::App* c) {
    c->add_option("--config", sh.config, "key=value configuration file");
    c->add_option("--json", sh.json, "write a JSON report here");
    c->add_option("--out", sh.out, "mesh output prefix");
    c->add_option("--res", sh.res, "resolution");
    c->add_option("--seed", sh.seed, "seed for random sampling");
    c->add_flag("--timing", sh.timing, "include runtimes in JSON");
  };

  int k = 2, m = 0;
  auto* tower = app.add_subcommand("tower", "Karcher-Scherk tower patch and its checks");
  add_shared(tower);
  params.flags["k"] = tower->add_option("--k", k, "number of wing pairs");
  params.flags["m"] = tower->add_option("--m", m, "straighten for this m");

  SpecFlags surf_flags, pert_flags;
  auto* surface = app.add_subcommand("surface", "assemble an initial surface M or N");
  add_shared(surface);
  Params surf_params;  // surface and perturb each own their spec flags
  surf_flags.add(surface, surf_params);

  std::string which = "hemisphere";
  double eps = 1e-3, X = 4, Y = 0.5;
  int sk = 2, lmax = 0;
  auto* spectral = app.add_subcommand("spectral", "spectral checks");
  add_shared(spectral);
  spectral->add_option("which", which)->check(CLI::IsMember({"hemisphere", "neumann", "strip", "flat-torus"}));
  auto* sk_opt = spectral->add_option("--k", sk);
  params.flags["eps"] = spectral->add_option("--eps", eps)->check(CLI::PositiveNumber);
  params.flags["X"] = spectral->add_option("--X", X)->check(CLI::PositiveNumber);
  params.flags["Y"] = spectral->add_option("--Y", Y)->check(CLI::PositiveNumber);
  params.flags["lmax"] = spectral->add_option("--lmax", lmax);

  std::string suite = "acceptance";
  std::vector<int> criteria;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_shared(verify);
  params.flags["suite"] = verify->add_option("--suite", suite);
  params.flags["criteria"] = verify->add_option("--criteria", criteria, "subset of criteria (1-12)");

  int iters = 10;
  auto* perturb = app.add_subcommand("perturb", "Newton iteration toward a minimal surface");
  add_shared(perturb);
  Params pert_params;
  pert_flags.add(perturb, pert_params);
  pert_params.flags["iters"] = perturb->add_option("--iters", iters);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list_claims) {
      for (const auto& c : claim_registry())
        std::cout << c.index << "\t" << c.id << "\t" << c.anchor << (c.gating ? "" : "\t[non-gating]") << "\n";
      return 0;
    }
    auto load = [&](Params& p, CLI::App* sub) {
      if (!sh.config.empty()) p.file = RunConfig::load(sh.config, kConfigKeys);
      for (const char* key : {"json", "out", "res", "seed", "timing"})
        p.flags[key] = sub->get_option(std::string("--") + key);
      p.resolve("json", sh.json);
      p.resolve("out", sh.out);
      p.resolve("res", sh.res);
      p.resolve("timing", sh.timing);
      int seed = int(sh.seed);
      p.resolve("seed", seed);
      sh.seed = unsigned(seed);
    };
    if (*tower) {
      load(params, tower);
      return cmd_tower(params, sh, k, m);
    }
    if (*surface) {
      load(surf_params, surface);
      return cmd_surface(surf_params, sh, surf_flags);
    }
    if (*spectral) {
      Params sp = params;
      sp.flags["k"] = sk_opt;
      load(sp, spectral);
      return cmd_spectral(sp, sh, which, sk, eps, X, Y, lmax);
    }
    if (*verify) {
      load(params, verify);
      return cmd_verify(params, sh, suite, criteria);
    }
    if (*perturb) {
      load(pert_params, perturb);
      return cmd_perturb(pert_params, sh, pert_flags, iters);
    }
    std::cout << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
