#include "desing/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "desing/error.hpp"

namespace desing {

namespace {

// tau = (r^{2k-2} - 1) / (r^{2k-2} + 1) = tanh((k-1) ln r)
double tau(int k, double r) { return std::tanh((k - 1) * std::log(r)); }
double tau_dr(int k, double r) {
  const double t = tau(k, r);
  return (k - 1) * (1 - t * t) / r;
}

}  // namespace

double radial_eigenfunction(const RadialMode& mode, double r) {
  const int k = mode.k;
  if (mode.kind == RadialMode::Kind::kernel) return r <= 0 ? -1.0 : tau(k, r);
  if (r <= 0 && mode.kind != RadialMode::Kind::u_lambda)
    throw Error(Errc::invalid_argument, "primed radial modes are singular at r = 0");
  if (r <= 0) {
    if (mode.lambda > 0) return 0.0;
    if (mode.lambda == 0) return k - 1.0;  // tau -> -1
    throw Error(Errc::invalid_argument, "u_lambda with lambda < 0 is singular at r = 0");
  }
  const double t = tau(k, r);
  switch (mode.kind) {
    case RadialMode::Kind::u_lambda:
      return (mode.lambda - (k - 1) * t) * std::pow(r, mode.lambda);
    case RadialMode::Kind::kernel:
      return t;
    case RadialMode::Kind::u_0prime:
      return 1.0 - (k - 1) * t * std::log(r);
    case RadialMode::Kind::u_kprime: {
      const double a = std::pow(r, 2 * k - 2);
      return std::pow(r, k - 1) * (a - 1 / a + 4 * (k - 1) * std::log(r)) / (a + 1);
    }
  }
  return 0.0;
}

double radial_eigenfunction_dr(const RadialMode& mode, double r) {
  const int k = mode.k;
  if (r <= 0) throw Error(Errc::invalid_argument, "radial derivative needs r > 0");
  const double t = tau(k, r), tp = tau_dr(k, r);
  switch (mode.kind) {
    case RadialMode::Kind::u_lambda: {
      const double l = mode.lambda;
      return -(k - 1) * tp * std::pow(r, l) + (l - (k - 1) * t) * l * std::pow(r, l - 1);
    }
    case RadialMode::Kind::kernel:
      return tp;
    case RadialMode::Kind::u_0prime:
      return -(k - 1) * (tp * std::log(r) + t / r);
    case RadialMode::Kind::u_kprime: {
      const double a = std::pow(r, 2 * k - 2);
      const double N = a - 1 / a + 4 * (k - 1) * std::log(r), D = a + 1;
      const double Np = (2 * k - 2) * (a + 1 / a) / r + 4 * (k - 1) / r;
      const double Dp = (2 * k - 2) * a / r;
      return (k - 1) * std::pow(r, k - 2) * N / D + std::pow(r, k - 1) * (Np * D - N * Dp) / (D * D);
    }
  }
  return 0.0;
}

double cyl_potential(int k, double r) {
  const double a = std::pow(r, 2 * k - 2);
  return 8.0 * (k - 1) * (k - 1) * a / ((a + 1) * (a + 1));
}

FactorizationResiduals factorization_check(int k, int ell, double r_min, double r_max, int n,
                                           unsigned seed) {
  if (!(r_min > 0 && r_max <= 1 && r_min < r_max) || n < 5)
    throw Error(Errc::invalid_argument, "grid must lie inside (0, 1] with at least 5 points");
  FactorizationResiduals R;
  const double s0 = std::log(r_min), s1 = std::log(r_max);
  R.h = (s1 - s0) / (n - 1);
  const double h = R.h;
  std::vector<double> s(n), V(n), T(n);
  for (int i = 0; i < n; ++i) {
    s[i] = s0 + i * h;
    V[i] = cyl_potential(k, std::exp(s[i]));
    T[i] = std::tanh((k - 1) * s[i]);
  }

  // L_cyl annihilates u_|l| e^{il theta}; l = 0 uses the kernel normalization.
  const double lam = std::abs(ell);
  RadialMode md{k, ell, lam, ell == 0 ? RadialMode::Kind::kernel : RadialMode::Kind::u_lambda};
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = radial_eigenfunction(md, std::exp(s[i]));
  for (int i = 1; i + 1 < n; ++i) {
    double uss = (u[i + 1] - 2 * u[i] + u[i - 1]) / (h * h);
    R.kernel = std::max(R.kernel, std::abs(uss + (V[i] - ell * ell) * u[i]));
  }

  // Operator identity on random trigonometric test functions.
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1, 1), freq(0.5, 3.0), ph(0, 2 * kPi);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, 3> a, b, c;
    for (int j = 0; j < 3; ++j) a[j] = amp(rng), b[j] = freq(rng), c[j] = ph(rng);
    auto f = [&](double x) {
      double v = 0;
      for (int j = 0; j < 3; ++j) v += a[j] * std::sin(b[j] * x + c[j]);
      return v;
    };
    auto fss = [&](double x) {
      double v = 0;
      for (int j = 0; j < 3; ++j) v -= a[j] * b[j] * b[j] * std::sin(b[j] * x + c[j]);
      return v;
    };
    // A_+ lives on half nodes so that A_- A_+ uses the compact three-point stencil.
    std::vector<double> F(n), G(n - 1);
    for (int i = 0; i < n; ++i) F[i] = f(s[i]);
    for (int i = 0; i + 1 < n; ++i) {
      const double th = std::tanh((k - 1) * (s[i] + 0.5 * h));
      G[i] = (F[i + 1] - F[i]) / h + (k - 1) * th * 0.5 * (F[i] + F[i + 1]);
    }
    for (int i = 1; i + 1 < n; ++i) {
      double AmAp = (G[i] - G[i - 1]) / h - (k - 1) * T[i] * 0.5 * (G[i] + G[i - 1]);
      double rhs = fss(s[i]) + V[i] * F[i];
      R.factorization = std::max(R.factorization, std::abs(AmAp + (k - 1) * (k - 1) * F[i] - rhs));
    }
  }

  // A_- r^lambda = u_lambda.
  for (int i = 1; i + 1 < n; ++i) {
    double d = (std::exp(lam * s[i + 1]) - std::exp(lam * s[i - 1])) / (2 * h);
    double am = d - (k - 1) * T[i] * std::exp(lam * s[i]);
    R.lowering = std::max(R.lowering, std::abs(am - radial_eigenfunction({k, ell, lam, RadialMode::Kind::u_lambda}, std::exp(s[i]))));
  }
  return R;
}

// ------------------------------------------------------------ Neumann root

double neumann_root_function(int k, double eps, double lambda) {
  const double L = std::log(eps);
  // lambda coth(lambda L) -> 1/L as lambda -> 0.
  const double x = lambda * L;
  const double lhs = std::abs(x) < 1e-8 ? 1.0 / L + lambda * x / 3.0 : lambda / std::tanh(x);
  return lhs - (k - 1) * std::tanh((k - 1) * L);
}

NeumannRoot neumann_negative_root(int k, double eps) {
  if (k < 2 || !(eps > 0 && eps < 1)) throw Error(Errc::invalid_argument, "need k >= 2, eps in (0,1)");
  auto F = [&](double l) { return neumann_root_function(k, eps, l); };
  NeumannRoot R;
  const double hi = 10.0 * k;
  const int N = 20000;
  double prev = F(hi / N);
  for (int i = 2; i <= N; ++i) {
    double cur = F(hi * i / N);
    if ((prev > 0) != (cur > 0)) ++R.sign_changes;
    prev = cur;
  }
  const double lo = 1e-9;
  if (!(F(lo) > 0 && F(hi) < 0)) throw Error(Errc::no_root, "no sign change on (0, 10k]: eps too large");
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
  auto br = boost::math::tools::bisect(F, lo, hi, tol);
  R.lambda = 0.5 * (br.first + br.second);

  // Independent secant iteration from the eps -> 0 limit.
  double x0 = k - 1.0, x1 = k - 0.9;
  double f0 = F(x0), f1 = F(x1);
  for (int it = 0; it < 100 && std::abs(x1 - x0) > 1e-14; ++it) {
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (x2 <= 0) x2 = 0.5 * x1;
    x0 = x1, f0 = f1, x1 = x2, f1 = F(x1);
  }
  R.secant = x1;
  return R;
}

// --------------------------------------------------------- Sturm counting

namespace {

using State = std::array<double, 1>;

// Pruefer angle for -v'' + (l^2 - V) v = mu w v in s = ln r, integrated from s0 to 0.
double pruefer(int k, int ell, double s0, double phi0, double mu, bool eta_weight) {
  namespace ode = boost::numeric::odeint;
  const double l2 = double(ell) * ell;
  auto rhs = [&](const State& y, State& dy, double s) {
    const double r = std::exp(s);
    const double w = eta_weight ? 4 * r * r / ((1 + r * r) * (1 + r * r)) : 1.0;
    const double q = l2 - cyl_potential(k, r);
    const double c = std::cos(y[0]), sn = std::sin(y[0]);
    dy[0] = c * c + (mu * w - q) * sn * sn;
  };
  State y{phi0};
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-12, 1e-10);
  ode::integrate_adaptive(stepper, rhs, y, s0, 0.0, 1e-3);
  return y[0];
}

int count_below(double phi, double offset) {
  // #{n >= 0 : offset + n pi < phi}
  if (phi <= offset) return 0;
  return int(std::ceil((phi - offset) / kPi - 1e-12));
}

}  // namespace

double pruefer_phase(int k, int ell, double eps, double mu, bool eta_weight) {
  return pruefer(k, ell, std::log(eps), 0.0, mu, eta_weight);
}

HemisphereCounts hemisphere_counts(int k, double eps, int L_max) {
  if (k < 2) throw Error(Errc::invalid_argument, "k must be at least 2");
  if (!(eps > 0 && eps <= 0.1)) throw Error(Errc::invalid_argument, "eps must lie in (0, 0.1]");
  if (L_max <= 0) L_max = 8 * k;
  HemisphereCounts H;
  H.k = k;
  H.eps = eps;
  const double s0 = std::log(eps);
  const double null_tol = 1e-4;
  for (int ell = 0; ell <= L_max; ell += k) {
    ModeCount M;
    M.ell = ell;
    M.multiplicity = ell == 0 ? 1 : 2;
    const double pa = pruefer(k, ell, s0, 0.0, 0.0, true);
    // Regular branch at the pole at mu = 0: v = r^|l| (1 + c r^{2k-2}) + O(r^{|l| + 4k - 4}).
    const double a = std::pow(eps, 2 * k - 2), c = -2.0 * (k - 1) / (ell + k - 1);
    const double phi_reg = std::atan2(1 + c * a, ell + c * (ell + 2 * k - 2) * a);
    const double pr = pruefer(k, ell, s0, phi_reg, 0.0, true);
    if (!std::isfinite(pa) || !std::isfinite(pr)) {
      H.warnings.push_back("shooting failure for mode " + std::to_string(ell));
      continue;
    }
    M.phase_dirichlet = M.phase_neumann = pa;
    M.regular_dirichlet = std::sin(pr);
    M.regular_neumann = std::cos(pr);
    M.dirichlet_neg = count_below(pa, kPi);
    M.neumann_neg = count_below(pa, kPi / 2);
    M.dirichlet_null = std::abs(M.regular_dirichlet) < null_tol;
    M.neumann_null = std::abs(M.regular_neumann) < null_tol;
    H.dirichlet.negatives += M.multiplicity * M.dirichlet_neg;
    H.neumann.negatives += M.multiplicity * M.neumann_neg;
    H.dirichlet.nullity += M.multiplicity * int(M.dirichlet_null);
    H.neumann.nullity += M.multiplicity * int(M.neumann_null);
    if (M.neumann_neg > 0 && H.neumann_negative_mode < 0) H.neumann_negative_mode = ell;
    H.modes.push_back(M);
  }
  return H;
}

// ----------------------------------------------------------------- eta

EtaFactor eta_factor(int k, cplx z) {
  const double a = std::abs(z);
  const double q = std::abs(std::pow(z, 2 * k) + 1.0);
  if (q < 1e-300) throw Error(Errc::singular_parameter, "z at a root of -1");
  const double b = std::pow(a, 2 * k - 2) + 1;
  EtaFactor E;
  E.conformal = 4 * q * q / (double(k * k) * (a * a + 1) * (a * a + 1) * b * b);
  E.potential = 2.0 * (k - 1) * (k - 1) * std::pow(a, 2 * k - 4) * std::pow((a * a + 1) / b, 2);
  return E;
}

// --------------------------------------------------------------- strip

namespace {

// log sinh(t) for t > 0
double log_sinh(double t) { return t + std::log1p(-std::exp(-2 * t)) - std::log(2.0); }

}  // namespace

double strip_green(int n, double X, double Y, double x, double xp) {
  const double W = X * kPi;
  if (n < 1 || !(X > 0 && Y > 0)) throw Error(Errc::invalid_argument, "strip_green needs n >= 1, X, Y > 0");
  const double a = x <= xp ? n * (W - xp) / Y : n * xp / Y;
  const double b = x <= xp ? n * x / Y : n * (W - x) / Y;
  if (a <= 0 || b <= 0) return 0.0;
  return -(Y / n) * std::exp(log_sinh(a) + log_sinh(b) - log_sinh(n * W / Y));
}

namespace {

void check_strip_equivariance(const StripProblem& P) {
  if (!(P.X > P.Y && P.Y > 0)) throw Error(Errc::invalid_argument, "strip needs X > Y > 0");
  if (!P.f) throw Error(Errc::invalid_argument, "strip forcing is empty");
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ux(0, P.X * kPi), uy(0, P.Y * kPi);
  for (int i = 0; i < 64; ++i) {
    const double x = ux(rng), y = uy(rng);
    const double f = P.f(x, y);
    const double tol = 1e-10 * (1 + std::abs(f));
    if (std::abs(f + P.f(x, -y)) > tol || std::abs(f + P.f(x, 2 * P.Y * kPi - y)) > tol)
      throw Error(Errc::equivariance_violation, "forcing is not odd under the strip reflections");
  }
}

StripSolution strip_grid(const StripProblem& P) {
  StripSolution S;
  S.x.resize(P.nx + 1);
  S.y.resize(P.ny + 1);
  for (int i = 0; i <= P.nx; ++i) S.x[i] = i * P.X * kPi / P.nx;
  for (int j = 0; j <= P.ny; ++j) S.y[j] = j * P.Y * kPi / P.ny;
  S.u = Eigen::MatrixXd::Zero(P.nx + 1, P.ny + 1);
  return S;
}

}  // namespace

StripSolution strip_solve(const StripProblem& P) {
  check_strip_equivariance(P);
  StripSolution S = strip_grid(P);
  const double W = P.X * kPi, Yp = P.Y * kPi, norm = std::sqrt(2.0 / Yp);
  const int nq = std::max(4 * P.modes, 256);

  // f_n(x) by the trapezoid rule, spectrally accurate for the odd periodic extension.
  auto fn = [&](int n, double x) {
    double acc = 0;
    for (int j = 1; j < nq; ++j) {
      const double y = j * Yp / nq;
      acc += P.f(x, y) * std::sin(n * y / P.Y);
    }
    return norm * acc * Yp / nq;
  };

  // Skip modes whose coefficient vanishes across the strip.
  std::vector<int> active;
  std::vector<double> probe(P.modes + 1, 0.0);
  for (int i = 0; i <= 64; ++i)
    for (int n = 1; n <= P.modes; ++n)
      probe[n] = std::max(probe[n], std::abs(fn(n, W * i / 64)));
  const double pmax = *std::max_element(probe.begin(), probe.end());
  for (int n = 1; n <= P.modes; ++n)
    if (probe[n] > 1e-14 * std::max(pmax, 1e-300)) active.push_back(n);

  // Gauss-Legendre panels on every grid cell; the kernel kinks only at grid nodes.
  using GL = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> qx, qw;
  for (int i = 0; i < P.nx; ++i) {
    const double c = 0.5 * (S.x[i] + S.x[i + 1]), r = 0.5 * (S.x[i + 1] - S.x[i]);
    const auto& ab = GL::abscissa();
    const auto& wt = GL::weights();
    for (size_t q = 0; q < ab.size(); ++q) {
      qx.push_back(c + r * ab[q]), qw.push_back(r * wt[q]);
      if (ab[q] != 0) qx.push_back(c - r * ab[q]), qw.push_back(r * wt[q]);
    }
  }
  for (int n : active) {
    std::vector<double> fq(qx.size());
    for (size_t q = 0; q < qx.size(); ++q) fq[q] = fn(n, qx[q]);
    Eigen::VectorXd un(P.nx + 1);
    for (int i = 0; i <= P.nx; ++i) {
      double acc = 0;
      for (size_t q = 0; q < qx.size(); ++q) acc += qw[q] * strip_green(n, P.X, P.Y, S.x[i], qx[q]) * fq[q];
      un[i] = acc;
    }
    for (int j = 0; j <= P.ny; ++j) S.u.col(j) += norm * std::sin(n * S.y[j] / P.Y) * un;
  }
  return S;
}

StripSolution strip_solve_fd(const StripProblem& P) {
  check_strip_equivariance(P);
  auto solve = [&](int nx, int ny) {
    const double hx = P.X * kPi / nx, hy = P.Y * kPi / ny;
    const int mx = nx - 1, my = ny - 1;
    auto id = [&](int i, int j) { return (i - 1) + mx * (j - 1); };
    std::vector<Eigen::Triplet<double>> t;
    Eigen::VectorXd b(mx * my);
    for (int j = 1; j <= my; ++j)
      for (int i = 1; i <= mx; ++i) {
        const int r = id(i, j);
        t.emplace_back(r, r, 2 / (hx * hx) + 2 / (hy * hy));
        if (i > 1) t.emplace_back(r, id(i - 1, j), -1 / (hx * hx));
        if (i < mx) t.emplace_back(r, id(i + 1, j), -1 / (hx * hx));
        if (j > 1) t.emplace_back(r, id(i, j - 1), -1 / (hy * hy));
        if (j < my) t.emplace_back(r, id(i, j + 1), -1 / (hy * hy));
        b[r] = -P.f(i * hx, j * hy);
      }
    Eigen::SparseMatrix<double> A(mx * my, mx * my);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw Error(Errc::io_error, "finite-difference factorization failed");
    Eigen::VectorXd u = ldlt.solve(b);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(nx + 1, ny + 1);
    for (int j = 1; j <= my; ++j)
      for (int i = 1; i <= mx; ++i) U(i, j) = u[id(i, j)];
    return U;
  };
  StripSolution S = strip_grid(P);
  // Richardson extrapolation over one refinement removes the h^2 term.
  Eigen::MatrixXd coarse = solve(P.nx, P.ny), fine = solve(2 * P.nx, 2 * P.ny);
  for (int i = 0; i <= P.nx; ++i)
    for (int j = 0; j <= P.ny; ++j) S.u(i, j) = (4 * fine(2 * i, 2 * j) - coarse(i, j)) / 3;
  return S;
}

double strip_decay_rate(const StripSolution& S, double x0, double x1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = 0; i < S.x.size(); ++i) {
    if (S.x[i] < x0 || S.x[i] > x1) continue;
    const double m = S.u.row(i).cwiseAbs().maxCoeff();
    if (!(m > 0)) continue;
    const double x = S.x[i], y = std::log(m);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 2) throw Error(Errc::insufficient_samples, "decay window holds fewer than two samples");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------- flat torus

FlatTorusReport flat_torus_kernel_report(int cutoff, int samples) {
  FlatTorusReport R;
  const double w = std::sqrt(2.0);
  // Separable basis: each factor is sin or cos of sqrt(2) times a coordinate,
  // so Delta acts by -(w^2 + w^2) exactly.
  for (int kind = 0; kind < 4; ++kind) {
    auto fx = [&](double x) { return kind & 1 ? std::cos(w * x) : std::sin(w * x); };
    auto fy = [&](double y) { return kind & 2 ? std::cos(w * y) : std::sin(w * y); };
    for (int i = 0; i < samples; ++i)
      for (int j = 0; j < samples; ++j) {
        const double x = 2 * kPi * i / samples, y = 2 * kPi * j / samples;
        const double f = fx(x) * fy(y);
        const double lap = -(w * w) * f - (w * w) * f;
        R.kernel_residual = std::max(R.kernel_residual, std::abs(lap + 4 * f));
      }
  }
  struct Spec {
    const char* label;
    int a, b;
    bool zero;
  };
  for (const Spec& s : {Spec{"square pi x pi, Dirichlet", 1, 1, false},
                        Spec{"rectangle pi x pi/2, Dirichlet", 1, 4, false},
                        Spec{"rectangle pi/4 x pi, Dirichlet", 16, 1, false},
                        Spec{"torus sqrt2 pi x pi/sqrt2", 8, 2, true}}) {
    EigenList L;
    L.label = s.label;
    L.a = s.a, L.b = s.b, L.from_zero = s.zero;
    std::set<int> vals;
    const int j0 = s.zero ? 0 : 1;
    for (int j1 = j0; s.a * j1 * j1 <= cutoff; ++j1)
      for (int j2 = j0; s.a * j1 * j1 + s.b * j2 * j2 <= cutoff; ++j2)
        if (j1 || j2) vals.insert(s.a * j1 * j1 + s.b * j2 * j2);
    L.values.assign(vals.begin(), vals.end());
    L.contains_four = vals.count(4) > 0;
    R.lists.push_back(std::move(L));
  }
  return R;
}

}  // namespace desing
