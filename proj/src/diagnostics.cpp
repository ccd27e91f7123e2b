#include "mhdw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mhdw::diag {

using disc::Grid;
using disc::ScalarField;
using disc::VectorField;
using mms::Jet;

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }

double artificial_density(double z, const RegParams& reg) {
  return reg.delta * (std::pow(z, reg.Gamma) / (reg.Gamma - 1.0) + z * z);
}

void require_window(std::span<const State> w, const char* where) {
  if (w.size() < 3) {
    std::ostringstream os;
    os << where << ": window needs at least 3 states (got " << w.size() << ")";
    throw std::invalid_argument(os.str());
  }
  for (std::size_t k = 1; k < w.size(); ++k) {
    disc::require_same_grid(w[0].grid(), w[k].grid(), where);
    if (!(w[k].t > w[k - 1].t)) throw std::invalid_argument(std::string(where) + ": times must increase");
  }
}

// Nodal value and gradient of one spatial factor.
struct Sampled {
  std::vector<double> v, x, y;
};

Sampled sample_jet(const std::function<Jet(double, double)>& f, const Grid& g) {
  Sampled s{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Jet J = f(g.x(i), g.y(j));
      const auto id = g.index(i, j);
      s.v[id] = J.v;
      s.x[id] = J.x;
      s.y[id] = J.y;
    }
  return s;
}

// Summation-by-parts time quadrature of int_0^tK (A psi' + B psi) dt plus the
// boundary terms psi(0) A(0) - psi(tK) A(tK); zero for exact solutions.
double time_quadrature(const std::vector<double>& t, const std::vector<double>& A, const std::vector<double>& B,
                       const std::function<double(double)>& psi) {
  const std::size_t K = t.size() - 1;
  double r = psi(t[0]) * A[0] - psi(t[K]) * A[K];
  for (std::size_t k = 0; k < K; ++k) {
    const double p0 = psi(t[k]), p1 = psi(t[k + 1]);
    r += 0.5 * (A[k] + A[k + 1]) * (p1 - p0);
    r += 0.5 * (p0 * B[k] + p1 * B[k + 1]) * (t[k + 1] - t[k]);
  }
  return r;
}

// (1 - z^2)^3 on |z| < 1.
Jet bump1(const Jet& z) {
  if (std::abs(z.v) >= 1.0) return Jet::constant(0.0);
  const Jet w = 1.0 - z * z;
  return w * w * w;
}

std::function<Jet(double, double)> bump(double cx, double cy, double rx, double ry) {
  return [=](double x, double y) {
    return bump1((mms::coord_x(x) - cx) / rx) * bump1((mms::coord_y(y) - cy) / ry);
  };
}

}  // namespace

// ---------------------------------------------------------------------------
// Report

const std::array<const char*, 16>& DiagnosticsReport::field_names() {
  static const std::array<const char*, 16> names{
      "t",
      "mass_rho",
      "mass_b",
      "kinetic_energy",
      "magnetic_energy",
      "internal_energy_total",
      "artificial_energy",
      "total_energy",
      "entropy_total",
      "sigma_integral",
      "domination_min",
      "domination_max",
      "energy_balance_residual",
      "entropy_balance_residual",
      "helmholtz_functional",
      "floor_violations"};
  return names;
}

std::array<double, 16> DiagnosticsReport::values() const {
  return {t,
          mass_rho,
          mass_b,
          kinetic_energy,
          magnetic_energy,
          internal_energy_total,
          artificial_energy,
          total_energy,
          entropy_total,
          sigma_integral,
          domination_min,
          domination_max,
          energy_balance_residual,
          entropy_balance_residual,
          helmholtz_functional,
          static_cast<double>(floor_violations)};
}

ScalarField sigma_density(const State& s, const RegParams& reg, const EosParams& p) {
  const auto d = solver::derivatives(s);
  ScalarField out(s.grid());
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    const double r = s.rho.v[i], b = s.b.v[i], th = s.theta.v[i];
    thermo::Tensor2 g{{{d.du.d[0][0][i], d.du.d[0][1][i]}, {d.du.d[1][0][i], d.du.d[1][1][i]}}};
    const auto S = thermo::viscous_stress(g, th, p);
    double sg = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) sg += S[a][c] * g[a][c];
    const double gt2 = sq(d.grad_theta.x[i]) + sq(d.grad_theta.y[i]);
    const double gr2 = sq(d.grad_rho.x[i]) + sq(d.grad_rho.y[i]);
    const double gb2 = sq(d.grad_b.x[i]) + sq(d.grad_b.y[i]);
    const double cond = thermo::conductivity(th, p) / th + reg.delta * (std::pow(th, reg.Gamma - 1.0) + 1.0 / (th * th));
    const double art = reg.epsilon * reg.delta *
                       ((reg.Gamma * std::pow(r, reg.Gamma - 2.0) + 2.0) * gr2 +
                        (reg.Gamma * std::pow(b, reg.Gamma - 2.0) + 2.0) * gb2);
    const double inner = sg + cond * gt2 + reg.delta / (th * th) + reg.epsilon * gb2 + art;
    out.v[i] = inner / th + reg.epsilon / (r * th) * thermo::dpressure_matter_drho({r, th}, p) * gr2;
  }
  return out;
}

DiagnosticsReport report(const State& s, const RegParams& reg, const EosParams& p) {
  const auto tot = solver::totals(s, reg, p);
  DiagnosticsReport r;
  r.t = s.t;
  r.mass_rho = tot.mass_rho;
  r.mass_b = tot.mass_b;
  r.kinetic_energy = tot.kinetic;
  r.magnetic_energy = tot.magnetic;
  r.internal_energy_total = tot.internal;
  r.artificial_energy = tot.artificial;
  r.total_energy = tot.energy();
  r.entropy_total = tot.entropy;
  r.sigma_integral = disc::integrate(sigma_density(s, reg, p));
  double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin, hf = 0.0;
  for (std::size_t i = 0; i < s.rho.v.size(); ++i) {
    const double rho = s.rho.v[i], b = s.b.v[i];
    const double z = b / rho;
    zmin = std::min(zmin, z);
    zmax = std::max(zmax, z);
    hf += 0.5 * rho * (sq(s.u.x[i]) + sq(s.u.y[i])) + thermo::helmholtz({rho, s.theta.v[i]}, p, reg.theta_bar) +
          0.5 * b * b + artificial_density(rho, reg) + artificial_density(b, reg);
  }
  r.domination_min = zmin;
  r.domination_max = zmax;
  r.energy_balance_residual = std::abs(r.total_energy - s.ledger.energy0 - s.ledger.energy_source);
  r.entropy_balance_residual = std::abs(r.entropy_total - s.ledger.entropy0 - s.ledger.entropy_source);
  r.helmholtz_functional = hf * s.grid().cell_area();
  r.floor_violations = s.floors.total();
  return r;
}

double entropy_balance_residual(std::span<const State> w, const RegParams& reg, const EosParams& p) {
  require_window(w, "entropy_balance_residual");
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < w.size(); ++k) {
    const double S0 = solver::totals(w[k - 1], reg, p).entropy;
    const double S1 = solver::totals(w[k + 1], reg, p).entropy;
    const double rate = solver::entropy_source_rate(w[k], solver::derivatives(w[k]), reg, p);
    sum += std::abs((S1 - S0) / (w[k + 1].t - w[k - 1].t) - rate);
  }
  return sum / double(w.size() - 2);
}

// ---------------------------------------------------------------------------
// Test functions

std::pair<std::function<double(double)>, std::function<double(double)>> temporal_factor(double T) {
  if (!(T > 0.0)) throw std::invalid_argument("temporal factor: T > 0");
  auto psi = [T](double t) { return t >= T ? 0.0 : std::pow(1.0 - t / T, 3); };
  auto dpsi = [T](double t) { return t >= T ? 0.0 : -3.0 / T * sq(1.0 - t / T); };
  return {psi, dpsi};
}

std::vector<TestFunction> test_library(double lx, double ly, double T) {
  auto [psi, dpsi] = temporal_factor(T);
  using mms::coord_x;
  using mms::coord_y;
  auto cx = [lx](double k) { return [=](double x, double) { return mms::cos(coord_x(x) * (k * kPi / lx)); }; };
  auto cy = [ly](double k) { return [=](double, double y) { return mms::cos(coord_y(y) * (k * kPi / ly)); }; };
  auto scalar = [&](std::string name, std::function<Jet(double, double)> f, bool nonneg) {
    TestFunction t;
    t.name = std::move(name);
    t.phi = std::move(f);
    t.psi = psi;
    t.dpsi = dpsi;
    t.t_end = T;
    t.nonneg = nonneg;
    return t;
  };
  auto vector = [&](std::string name, std::function<Jet(double, double)> f1, std::function<Jet(double, double)> f2) {
    TestFunction t = scalar(std::move(name), std::move(f1), false);
    t.kind = TestFunction::Kind::Vector;
    t.phi2 = std::move(f2);
    t.requires_compact_spatial_support = true;
    return t;
  };
  auto zero = [](double, double) { return Jet::constant(0.0); };
  const auto B = bump(0.5 * lx, 0.5 * ly, 0.35 * lx, 0.35 * ly);
  const auto B2 = bump(0.4 * lx, 0.6 * ly, 0.3 * lx, 0.3 * ly);

  std::vector<TestFunction> lib;
  lib.push_back(scalar("constant", [](double, double) { return Jet::constant(1.0); }, true));
  lib.push_back(scalar("cos_x", cx(1), false));
  lib.push_back(scalar("cos_y", cy(1), false));
  lib.push_back(scalar("cos_xy", [=](double x, double y) { return cx(1)(x, y) * cy(1)(x, y); }, false));
  lib.push_back(scalar("cos_2x", cx(2), false));
  lib.push_back(scalar("one_plus_cos_xy", [=](double x, double y) { return 1.0 + cx(1)(x, y) * cy(1)(x, y); }, true));
  lib.push_back(scalar(
      "cos_product_shifted", [=](double x, double y) { return (1.0 + cx(1)(x, y)) * (1.0 + cy(1)(x, y)) / 4.0; },
      true));
  lib.push_back(scalar("bump_squared", [=](double x, double y) { return B(x, y) * B(x, y); }, true));
  lib.push_back(vector("bump_x", B, zero));
  lib.push_back(vector("bump_y", zero, B));
  lib.push_back(vector("bump_shifted_diagonal", B2, B2));
  lib.push_back(
      scalar("one_plus_half_cos_x2y", [=](double x, double y) { return 1.0 + 0.5 * cx(1)(x, y) * cy(2)(x, y); }, true));
  return lib;
}

void validate_test_function(const TestFunction& f, const Grid& g) {
  std::ostringstream os;
  if (!f.phi) os << "missing spatial factor; ";
  if (!f.psi) os << "missing temporal factor; ";
  const bool vec = f.kind == TestFunction::Kind::Vector;
  if (vec && !f.phi2) os << "vector test without second component; ";
  if (!vec && f.phi2) os << "scalar test with a second component; ";
  if (f.psi && std::abs(f.psi(f.t_end)) > 1e-14) os << "temporal factor does not vanish at T; ";
  if (f.phi && f.nonneg) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 4 * g.ny; ++j)
      for (int i = 0; i <= 4 * g.nx; ++i)
        m = std::min(m, f.phi(g.lx * i / (4.0 * g.nx), g.ly * j / (4.0 * g.ny)).v);
    if (m < -1e-14) os << "nonneg test takes the value " << m << "; ";
  }
  if (f.phi && f.requires_compact_spatial_support) {
    double m = 0.0;
    constexpr int kEdge = 64;
    for (int q = 0; q <= kEdge; ++q) {
      const double sx = g.lx * q / kEdge, sy = g.ly * q / kEdge;
      for (auto* c : {&f.phi, &f.phi2}) {
        if (!*c) continue;
        for (const Jet& J : {(*c)(sx, 0.0), (*c)(sx, g.ly), (*c)(0.0, sy), (*c)(g.lx, sy)})
          m = std::max({m, std::abs(J.v), std::abs(J.x), std::abs(J.y)});
      }
    }
    if (m > 1e-14) os << "test is not compactly supported (boundary value " << m << "); ";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw std::invalid_argument("test function '" + f.name + "': " + msg);
}

const char* equation_name(Equation e) {
  switch (e) {
    case Equation::Continuity: return "continuity";
    case Equation::Momentum: return "momentum";
    case Equation::Entropy: return "entropy";
    case Equation::Magnetic: return "magnetic";
    case Equation::Energy: return "energy";
  }
  return "?";
}

std::vector<WeakResidual> weak_residuals(std::span<const State> traj, const std::vector<TestFunction>& tests,
                                         const RegParams& reg, const EosParams& p) {
  if (traj.size() < 2) throw std::invalid_argument("weak_residuals: trajectory needs at least 2 states");
  for (std::size_t k = 1; k < traj.size(); ++k) {
    disc::require_same_grid(traj[0].grid(), traj[k].grid(), "weak_residuals");
    if (!(traj[k].t > traj[k - 1].t)) throw std::invalid_argument("weak_residuals: times must increase");
  }
  const Grid& g = traj[0].grid();
  for (const auto& f : tests) validate_test_function(f, g);
  const std::size_t K = traj.size(), N = g.size();
  const double dA = g.cell_area();

  // Per-state nodal quantities shared by all tests.
  struct Nodal {
    solver::FieldDerivatives d;
    std::vector<double> rhos, flux_coef, ent_rate, ptot;
    std::vector<double> S[2][2];
  };
  std::vector<Nodal> nodal(K);
  std::vector<double> times(K);
  for (std::size_t k = 0; k < K; ++k) {
    const State& s = traj[k];
    Nodal& n = nodal[k];
    times[k] = s.t;
    n.d = solver::derivatives(s);
    n.ent_rate = solver::entropy_source_density(s, n.d, reg, p).v;
    n.rhos.resize(N);
    n.flux_coef.resize(N);
    n.ptot.resize(N);
    for (auto& row : n.S)
      for (auto& c : row) c.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double r = s.rho.v[i], b = s.b.v[i], th = s.theta.v[i];
      n.rhos[i] = r * thermo::entropy({r, th}, p).total();
      n.flux_coef[i] = thermo::kappa_delta(th, p, reg.delta, reg.Gamma) / th;
      n.ptot[i] = thermo::pressure({r, th}, p).total() + 0.5 * b * b +
                  reg.delta * (std::pow(r, reg.Gamma) + r * r + std::pow(b, reg.Gamma) + b * b);
      thermo::Tensor2 gu{{{n.d.du.d[0][0][i], n.d.du.d[0][1][i]}, {n.d.du.d[1][0][i], n.d.du.d[1][1][i]}}};
      const auto S = thermo::viscous_stress(gu, th, p);
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) n.S[a][c][i] = S[a][c];
    }
  }

  std::vector<WeakResidual> out;
  std::vector<double> A(K), B(K);
  for (const auto& f : tests) {
    const Sampled s1 = sample_jet(f.phi, g);
    if (f.kind == TestFunction::Kind::Scalar) {
      // Transport equations: rho_t + div(rho u) = eps Lap rho, likewise b.
      for (Equation eq : {Equation::Continuity, Equation::Magnetic}) {
        for (std::size_t k = 0; k < K; ++k) {
          const State& s = traj[k];
          const ScalarField& q = eq == Equation::Continuity ? s.rho : s.b;
          const VectorField& gq = eq == Equation::Continuity ? nodal[k].d.grad_rho : nodal[k].d.grad_b;
          double a = 0.0, b = 0.0;
          for (std::size_t i = 0; i < N; ++i) {
            a += q.v[i] * s1.v[i];
            b += q.v[i] * (s.u.x[i] * s1.x[i] + s.u.y[i] * s1.y[i]) -
                 reg.epsilon * (gq.x[i] * s1.x[i] + gq.y[i] * s1.y[i]);
          }
          A[k] = a * dA;
          B[k] = b * dA;
        }
        out.push_back({eq, f.name, time_quadrature(times, A, B, f.psi)});
      }
      if (f.nonneg) {
        for (std::size_t k = 0; k < K; ++k) {
          const State& s = traj[k];
          const Nodal& n = nodal[k];
          double a = 0.0, b = 0.0;
          for (std::size_t i = 0; i < N; ++i) {
            a += n.rhos[i] * s1.v[i];
            b += n.rhos[i] * (s.u.x[i] * s1.x[i] + s.u.y[i] * s1.y[i]) -
                 n.flux_coef[i] * (n.d.grad_theta.x[i] * s1.x[i] + n.d.grad_theta.y[i] * s1.y[i]) +
                 s1.v[i] * n.ent_rate[i];
          }
          A[k] = a * dA;
          B[k] = b * dA;
        }
        out.push_back({Equation::Entropy, f.name, time_quadrature(times, A, B, f.psi)});
      }
    } else {
      const Sampled s2 = sample_jet(f.phi2, g);
      const Sampled* ph[2] = {&s1, &s2};
      for (std::size_t k = 0; k < K; ++k) {
        const State& s = traj[k];
        const Nodal& n = nodal[k];
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const double r = s.rho.v[i];
          const double u[2] = {s.u.x[i], s.u.y[i]};
          const double gr[2] = {n.d.grad_rho.x[i], n.d.grad_rho.y[i]};
          const double divphi = s1.x[i] + s2.y[i];
          b += n.ptot[i] * divphi;
          for (int c = 0; c < 2; ++c) {
            const double gphi[2] = {ph[c]->x[i], ph[c]->y[i]};
            a += r * u[c] * ph[c]->v[i];
            for (int e = 0; e < 2; ++e) b += (r * u[c] * u[e] - n.S[c][e][i]) * gphi[e];
            b -= reg.epsilon * (gr[0] * n.d.du.d[c][0][i] + gr[1] * n.d.du.d[c][1][i]) * ph[c]->v[i];
          }
        }
        A[k] = a * dA;
        B[k] = b * dA;
      }
      out.push_back({Equation::Momentum, f.name, time_quadrature(times, A, B, f.psi)});
    }
  }

  double e = 0.0;
  for (const State& s : traj) e = std::max(e, report(s, reg, p).energy_balance_residual);
  out.push_back({Equation::Energy, "ledger", e});
  return out;
}

// ---------------------------------------------------------------------------
// Cut-offs

namespace {
void check_cutoff_args(double z, double k, const char* what) {
  if (!(k >= 1.0)) throw std::invalid_argument(std::string(what) + ": k >= 1 required");
  if (std::isnan(z) || z < 0.0) {
    std::ostringstream os;
    os << what << ": argument must be nonnegative (got " << z << ")";
    throw DomainError(os.str());
  }
}
}  // namespace

double cutoff_T(double z, double k) {
  check_cutoff_args(z, k, "cutoff_T");
  const double w = z / k;
  if (w <= 1.0) return z;
  if (w >= 3.0) return 2.0 * k;
  const double s = 0.5 * (w - 1.0);
  return k * (1.0 + 2.0 * s - s * s);
}

double cutoff_T_prime(double z, double k) {
  check_cutoff_args(z, k, "cutoff_T_prime");
  const double w = z / k;
  if (w <= 1.0) return 1.0;
  if (w >= 3.0) return 0.0;
  return 1.0 - 0.5 * (w - 1.0);
}

double cutoff_L(double rho, double k) {
  check_cutoff_args(rho, k, "cutoff_L");
  if (rho == 0.0) return -std::numeric_limits<double>::infinity();
  // Continuous antiderivative of T_k(z)/z^2, one branch per piece of T_k.
  auto G = [k](double z) {
    if (z <= k) return std::log(z);
    if (z <= 3.0 * k) return 1.5 * std::log(z) - z / (4.0 * k) + k / (4.0 * z) - 0.5 * std::log(k);
    return -2.0 * k / z + std::log(k) + 1.5 * std::log(3.0);
  };
  return G(rho) - G(1.0);
}

namespace {
// Window-averaged L1 norm of f(q)_t + div(f(q) u) + (f'(q) q - f(q)) div u - eps f'(q) Lap q.
double transport_residual(std::span<const State> w, Which which, const RegParams& reg,
                          const std::function<double(double)>& f, const std::function<double(double)>& df) {
  auto field = [which](const State& s) -> const ScalarField& { return which == Which::Rho ? s.rho : s.b; };
  double total = 0.0;
  for (std::size_t k = 1; k + 1 < w.size(); ++k) {
    const State& s = w[k];
    const ScalarField& q = field(s);
    const Grid& g = s.grid();
    const double dt2 = w[k + 1].t - w[k - 1].t;
    VectorField flux(g);
    std::vector<double> fq(g.size()), dfq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      fq[i] = f(q.v[i]);
      dfq[i] = df(q.v[i]);
      flux.x[i] = fq[i] * s.u.x[i];
      flux.y[i] = fq[i] * s.u.y[i];
    }
    const auto divf = disc::divergence(flux);
    const auto lap = disc::laplacian_neumann(q);
    const auto du = disc::velocity_gradient(s.a, s.basis);
    const ScalarField& qm = field(w[k - 1]);
    const ScalarField& qp = field(w[k + 1]);
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double divu = du.d[0][0][i] + du.d[1][1][i];
      const double r = (f(qp.v[i]) - f(qm.v[i])) / dt2 + divf.v[i] + (dfq[i] * q.v[i] - fq[i]) * divu -
                       reg.epsilon * dfq[i] * lap.v[i];
      l1 += std::abs(r);
    }
    total += l1 * g.cell_area();
  }
  return total / double(w.size() - 2);
}
}  // namespace

double renormalized_residual(std::span<const State> w, double k, Which which, const RegParams& reg) {
  require_window(w, "renormalized_residual");
  if (!(k >= 1.0)) throw std::invalid_argument("renormalized_residual: k >= 1 required");
  return transport_residual(
      w, which, reg, [k](double z) { return cutoff_T(z, k); }, [k](double z) { return cutoff_T_prime(z, k); });
}

double continuity_residual(std::span<const State> w, Which which, const RegParams& reg) {
  require_window(w, "continuity_residual");
  return transport_residual(
      w, which, reg, [](double z) { return z; }, [](double) { return 1.0; });
}

// ---------------------------------------------------------------------------
// Inequality constants

double korn_ratio(std::span<const double> coeffs, const disc::GalerkinBasis& basis) {
  const auto du = disc::velocity_gradient(coeffs, basis);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < basis.grid.size(); ++i) {
    const double div = du.d[0][0][i] + du.d[1][1][i];
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a) {
        num += sq(du.d[c][a][i]);
        den += sq(du.d[c][a][i] + du.d[a][c][i] - (a == c ? div : 0.0));
      }
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(num / den);
}

double poincare_ratio(const ScalarField& u) {
  const Grid& g = u.grid;
  const auto gu = disc::gradient(u);
  double u2 = 0.0, g2 = 0.0, left = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto id = g.index(i, j);
      u2 += sq(u.v[id]);
      g2 += sq(gu.x[id]) + sq(gu.y[id]);
      if (g.x(i) < 0.5 * g.lx) left += sq(u.v[id]);
    }
  const double dA = g.cell_area();
  const double den = std::sqrt(g2 * dA) + std::sqrt(left * dA);
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt((u2 + g2) * dA) / den;
}

InequalityConstants inequality_constants(const Grid& g, int samples, std::uint64_t seed, const EosParams& p,
                                         double theta_bar, double rho_bar) {
  g.validate();
  if (samples < 100) throw std::invalid_argument("inequality_constants: samples >= 100 required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  InequalityConstants out;

  // Korn over random no-slip Galerkin fields with algebraically decaying spectra.
  const int box = (g.nx / 2 - 1) * (g.ny / 2 - 1);
  const auto basis = disc::build_basis(g, std::min(32, box));
  std::vector<double> a(basis.dim());
  for (int s = 0; s < samples; ++s) {
    for (int c = 0; c < 2; ++c)
      for (int m = 0; m < basis.n(); ++m) {
        const auto md = basis.modes[m];
        a[c * basis.n() + m] = normal(rng) / double(md.k * md.k + md.l * md.l);
      }
    const double r = korn_ratio(a, basis);
    if (std::isnan(r)) continue;
    out.korn_ratio_max = std::max(out.korn_ratio_max, r);
    ++out.korn_samples;
  }

  // Poincare over random cosine fields; the constant field is the first sample.
  auto tr = disc::Transforms::for_grid(g);
  constexpr int kModes = 8;
  std::vector<double> c(g.size());
  for (int s = 0; s < samples; ++s) {
    std::fill(c.begin(), c.end(), 0.0);
    if (s == 0) {
      c[0] = 1.0;
    } else {
      for (int l = 0; l < std::min(kModes, g.ny); ++l)
        for (int k = 0; k < std::min(kModes, g.nx); ++k) c[g.index(k, l)] = normal(rng) / double(1 + k * k + l * l);
    }
    const double r = poincare_ratio(ScalarField(g, tr->synthesize(c, disc::Parity::Even, disc::Parity::Even)));
    if (std::isnan(r)) continue;
    out.poincare_ratio_max = std::max(out.poincare_ratio_max, r);
    ++out.poincare_samples;
  }

  double margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j)
      margin = std::min(margin, thermo::helmholtz_coercivity({0.1 * i, 0.1 * j}, p, theta_bar, rho_bar).margin());
  out.coercivity_min_margin = margin;
  return out;
}

}  // namespace mhdw::diag
