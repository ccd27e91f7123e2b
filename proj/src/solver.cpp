#include "mhdw/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mhdw::solver {

using disc::Axis;
using disc::Parity;
using disc::Transforms;

namespace {

constexpr int kNewtonMaxIter = 60;
constexpr double kNewtonTol = 1e-13;
constexpr double kNewtonAccept = 1e-9;  // stagnation is tolerated below this
constexpr int kCgMaxIter = 400;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Artificial-pressure energy density delta (z^G/(G-1) + z^2).
double artificial_density(double z, const RegParams& reg) {
  return reg.delta * (std::pow(z, reg.Gamma) / (reg.Gamma - 1.0) + z * z);
}

// eps delta (G z^(G-2) + 2) |grad z|^2
double artificial_dissipation(double z, double g2, const RegParams& reg) {
  return reg.epsilon * reg.delta * (reg.Gamma * std::pow(z, reg.Gamma - 2.0) + 2.0) * g2;
}

// Nodal S : grad u and the stress tensor itself.
struct Stress {
  std::vector<double> s[2][2];
  std::vector<double> contraction;
};

Stress viscous(const disc::VelocityGradient& du, const ScalarField& theta, const EosParams& p) {
  const std::size_t n = theta.v.size();
  Stress out;
  for (auto& row : out.s)
    for (auto& c : row) c.resize(n);
  out.contraction.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    thermo::Tensor2 g{{{du.d[0][0][i], du.d[0][1][i]}, {du.d[1][0][i], du.d[1][1][i]}}};
    auto S = thermo::viscous_stress(g, theta.v[i], p);
    double c = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        out.s[a][b][i] = S[a][b];
        c += S[a][b] * g[a][b];
      }
    out.contraction[i] = c;
  }
  return out;
}

// Galerkin functional <S, grad(phi_m e_c)> for both components, component-major.
std::vector<double> viscous_functional(const Stress& st, const GalerkinBasis& basis) {
  const int n = basis.n();
  std::vector<double> out(2 * n);
  for (int c = 0; c < 2; ++c) {
    auto tx = disc::test_dx(st.s[c][0], basis);
    auto ty = disc::test_dy(st.s[c][1], basis);
    for (int m = 0; m < n; ++m) out[c * n + m] = tx[m] + ty[m];
  }
  return out;
}

// Nodal source terms of the internal-energy equation that the scheme treats
// at level n+1 in rho and b: eps |grad b|^2 + eps delta [...].
std::vector<double> magnetic_heating(const ScalarField& rho, const ScalarField& b, const RegParams& reg) {
  auto gr = disc::gradient(rho);
  auto gb = disc::gradient(b);
  std::vector<double> out(rho.v.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r2 = gr.x[i] * gr.x[i] + gr.y[i] * gr.y[i];
    const double b2 = gb.x[i] * gb.x[i] + gb.y[i] * gb.y[i];
    out[i] = reg.epsilon * b2 + artificial_dissipation(rho.v[i], r2, reg) + artificial_dissipation(b.v[i], b2, reg);
  }
  return out;
}

void require_positive_field(const ScalarField& f, const char* name) {
  for (double v : f.v)
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << name << " must be strictly positive (found " << v << ")";
      throw DomainError(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> RegParams::violations(const EosParams& p) const {
  std::vector<std::string> out;
  if (!(epsilon > 0.0)) out.push_back("reg: epsilon > 0");
  if (!(delta > 0.0)) out.push_back("reg: delta > 0");
  if (!(Gamma >= std::max(4.0, 2.0 * p.gamma))) out.push_back("reg: Γ ≥ max(4, 2γ)");
  if (n < 1) out.push_back("reg: n >= 1");
  if (!(theta_bar > 0.0)) out.push_back("reg: theta_bar > 0");
  if (picard_sweeps < 1 || picard_sweeps > 3) out.push_back("reg: picard_sweeps in [1, 3]");
  return out;
}

void RegParams::validate(const EosParams& p) const {
  auto v = violations(p);
  if (v.empty()) return;
  std::string msg;
  for (auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw std::invalid_argument(msg);
}

void State::set_velocity(std::vector<double> coeffs) {
  a = std::move(coeffs);
  u = disc::reconstruct(a, basis);
}

long Schedule::steps() const {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("schedule: dt > 0 and t_final >= 0");
  return std::lround(t_final / dt);
}

// ---------------------------------------------------------------------------
// Initial data

InitialData make_initial_data(ScalarField rho0, ScalarField b0, ScalarField theta0, VectorField u0) {
  disc::require_same_grid(rho0.grid, b0.grid, "initial data");
  disc::require_same_grid(rho0.grid, theta0.grid, "initial data");
  disc::require_same_grid(rho0.grid, u0.grid, "initial data");
  require_positive_field(rho0, "rho0");
  require_positive_field(b0, "b0");
  require_positive_field(theta0, "theta0");
  InitialData d{std::move(rho0), std::move(b0), std::move(theta0), std::move(u0), 0.0, 0.0};
  d.c_star = std::numeric_limits<double>::infinity();
  d.c_star_upper = 0.0;
  for (std::size_t i = 0; i < d.rho0.v.size(); ++i) {
    const double z = d.b0.v[i] / d.rho0.v[i];
    d.c_star = std::min(d.c_star, z);
    d.c_star_upper = std::max(d.c_star_upper, z);
  }
  return d;
}

InitialData regularize_initial_data(const InitialData& raw, const RegParams&) {
  require_positive_field(raw.rho0, "rho0");
  require_positive_field(raw.b0, "b0");
  require_positive_field(raw.theta0, "theta0");
  const Grid& g = raw.rho0.grid;
  auto tr = Transforms::for_grid(g);
  // Gaussian multiplier; its cosine kernel is a sampled theta function, hence positive.
  auto mult = [&](int k, int l) {
    const double x = double(k) / g.nx, y = double(l) / g.ny;
    return std::exp(-36.0 * (x * x + y * y));
  };
  auto smooth = [&](const ScalarField& f) { return ScalarField(g, tr->filter(f.v, mult)); };
  return make_initial_data(smooth(raw.rho0), smooth(raw.b0), smooth(raw.theta0), raw.u0);
}

State make_state(const InitialData& init, const RegParams& reg, const EosParams& p) {
  State s;
  s.rho = init.rho0;
  s.b = init.b0;
  s.theta = init.theta0;
  s.basis = disc::build_basis(init.rho0.grid, reg.n);
  s.set_velocity(disc::project_velocity(init.u0, s.basis));
  auto tot = totals(s, reg, p);
  s.ledger.energy0 = tot.energy();
  s.ledger.entropy0 = tot.entropy;
  s.ledger.entropy_rate = entropy_source_rate(s, derivatives(s), reg, p);
  return s;
}

// ---------------------------------------------------------------------------
// Shared field quantities

FieldDerivatives derivatives(const State& s) {
  FieldDerivatives d;
  d.grad_rho = disc::gradient(s.rho);
  d.grad_b = disc::gradient(s.b);
  d.grad_theta = disc::gradient(s.theta);
  d.lap_rho = disc::laplacian_neumann(s.rho);
  d.du = disc::velocity_gradient(s.a, s.basis);
  d.div_u = ScalarField(s.grid());
  for (std::size_t i = 0; i < d.div_u.v.size(); ++i) d.div_u.v[i] = d.du.d[0][0][i] + d.du.d[1][1][i];
  return d;
}

Totals totals(const State& s, const RegParams& reg, const EosParams& p) {
  Totals t;
  const std::size_t n = s.rho.v.size();
  double mr = 0, mb = 0, ke = 0, me = 0, ie = 0, ae = 0, en = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.rho.v[i], b = s.b.v[i], th = s.theta.v[i];
    mr += r;
    mb += b;
    ke += 0.5 * r * (s.u.x[i] * s.u.x[i] + s.u.y[i] * s.u.y[i]);
    me += 0.5 * b * b;
    ie += r * thermo::internal_energy({r, th}, p).total();
    ae += artificial_density(r, reg) + artificial_density(b, reg);
    en += r * thermo::entropy({r, th}, p).total();
  }
  const double dA = s.grid().cell_area();
  t.mass_rho = mr * dA;
  t.mass_b = mb * dA;
  t.kinetic = ke * dA;
  t.magnetic = me * dA;
  t.internal = ie * dA;
  t.artificial = ae * dA;
  t.entropy = en * dA;
  return t;
}

double energy_source_rate(const ScalarField& theta, const RegParams& reg) {
  double s = 0.0;
  for (double th : theta.v) s += reg.delta / (th * th) - reg.epsilon * std::pow(th, 5);
  return s * theta.grid.cell_area();
}

ScalarField entropy_source_density(const State& s, const FieldDerivatives& d, const RegParams& reg,
                                   const EosParams& p) {
  auto st = viscous(d.du, s.theta, p);
  ScalarField out(s.grid());
  for (std::size_t i = 0; i < s.rho.v.size(); ++i) {
    const double r = s.rho.v[i], b = s.b.v[i], th = s.theta.v[i];
    const double gt2 = d.grad_theta.x[i] * d.grad_theta.x[i] + d.grad_theta.y[i] * d.grad_theta.y[i];
    const double gr2 = d.grad_rho.x[i] * d.grad_rho.x[i] + d.grad_rho.y[i] * d.grad_rho.y[i];
    const double gb2 = d.grad_b.x[i] * d.grad_b.x[i] + d.grad_b.y[i] * d.grad_b.y[i];
    const double kappa = thermo::conductivity(th, p);
    const double cond = kappa / th + reg.delta * (std::pow(th, reg.Gamma - 1.0) + 1.0 / (th * th));
    const double inner = st.contraction[i] + cond * gt2 + reg.delta / (th * th) + reg.epsilon * gb2 +
                         artificial_dissipation(r, gr2, reg) + artificial_dissipation(b, gb2, reg);
    const thermo::ThermoPoint pt{r, th};
    const double coupling = reg.epsilon * d.lap_rho.v[i] / th *
                            (th * thermo::entropy(pt, p).total() - thermo::internal_energy(pt, p).total() -
                             thermo::pressure(pt, p).total() / r);
    out.v[i] = inner / th + coupling - reg.epsilon * std::pow(th, 4);
  }
  return out;
}

double entropy_source_rate(const State& s, const FieldDerivatives& d, const RegParams& reg, const EosParams& p) {
  return disc::integrate(entropy_source_density(s, d, reg, p));
}

// ---------------------------------------------------------------------------
// Sub-steps

double cfl_limit(const VectorField& u) {
  double umax = 0.0;
  for (std::size_t i = 0; i < u.x.size(); ++i) umax = std::max(umax, std::hypot(u.x[i], u.y[i]));
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::min(u.grid.hx(), u.grid.hy()) / umax;
}

void check_cfl(const VectorField& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double lim = cfl_limit(u);
  if (dt > lim * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " exceeds 0.5*h/max|u| = " << lim << "; suggested dt = " << 0.9 * lim;
    throw CflError(os.str(), 0.9 * lim);
  }
}

ScalarField advance_scalar(const ScalarField& f, const VectorField& u, double epsilon, double dt,
                           const ScalarField* source) {
  disc::require_same_grid(f.grid, u.grid, "advance_scalar");
  check_cfl(u, dt);
  VectorField flux(f.grid);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    flux.x[i] = f.v[i] * u.x[i];
    flux.y[i] = f.v[i] * u.y[i];
  }
  auto div = disc::divergence(flux);
  std::vector<double> rhs(f.v.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = f.v[i] - dt * div.v[i] + (source ? dt * source->v[i] : 0.0);
  return ScalarField(f.grid, Transforms::for_grid(f.grid)->solve_shifted_laplacian(rhs, dt * epsilon));
}

ScalarField advance_temperature(const State& prev, const ScalarField& rho_next, const ScalarField& b_next,
                                const RegParams& reg, const EosParams& p, double dt, NewtonReport* report,
                                const ScalarField* source) {
  const Grid& g = prev.grid();
  disc::require_same_grid(g, rho_next.grid, "advance_temperature");
  auto tr = Transforms::for_grid(g);
  const std::size_t N = g.size();

  // Explicit part at level n.
  auto du = disc::velocity_gradient(prev.a, prev.basis);
  auto st = viscous(du, prev.theta, p);
  std::vector<double> E(N);
  VectorField flux(g);
  for (std::size_t i = 0; i < N; ++i) {
    E[i] = prev.rho.v[i] * thermo::internal_energy({prev.rho.v[i], prev.theta.v[i]}, p).total();
    flux.x[i] = E[i] * prev.u.x[i];
    flux.y[i] = E[i] * prev.u.y[i];
  }
  auto div_flux = disc::divergence(flux);
  auto heating = magnetic_heating(rho_next, b_next, reg);
  std::vector<double> R(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double divu = du.d[0][0][i] + du.d[1][1][i];
    const double pn = thermo::pressure({prev.rho.v[i], prev.theta.v[i]}, p).total();
    R[i] = E[i] + dt * (-div_flux.v[i] + st.contraction[i] - pn * divu + heating[i] + (source ? source->v[i] : 0.0));
  }
  const double scale = std::max(1.0, max_abs(R));

  auto residual = [&](const std::vector<double>& th, std::vector<double>& F) {
    std::vector<double> K(N);
    for (std::size_t i = 0; i < N; ++i) K[i] = thermo::K_delta(th[i], p, reg.delta, reg.Gamma);
    auto lapK = tr->laplacian(K);
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double t = th[i];
      const double src = reg.delta / (t * t) - reg.epsilon * std::pow(t, 5);
      F[i] = rho_next.v[i] * thermo::internal_energy({rho_next.v[i], t}, p).total() - dt * lapK[i] - dt * src - R[i];
      m = std::max(m, std::abs(F[i]));
    }
    return m / scale;
  };

  std::vector<double> th = prev.theta.v, F(N), trial(N), Ftrial(N);
  double res = residual(th, F);
  int it = 0;
  double best = res;
  int stalled = 0;
  for (; it < kNewtonMaxIter && res > kNewtonTol; ++it) {
    // J v = c v - dt Lap(kappa_delta v); with w = kappa_delta v the operator
    // diag(c/kappa_delta) - dt Lap is symmetric positive definite.
    std::vector<double> d(N), kap(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double t = th[i];
      const double c = rho_next.v[i] * thermo::denergy_dtheta({rho_next.v[i], t}, p) +
                       dt * (2.0 * reg.delta / (t * t * t) + 5.0 * reg.epsilon * std::pow(t, 4));
      kap[i] = thermo::kappa_delta(t, p, reg.delta, reg.Gamma);
      d[i] = c / kap[i];
    }
    const double dbar = std::accumulate(d.begin(), d.end(), 0.0) / double(N);
    auto apply = [&](const std::vector<double>& w) {
      auto lw = tr->laplacian(w);
      for (std::size_t i = 0; i < N; ++i) lw[i] = d[i] * w[i] - dt * lw[i];
      return lw;
    };
    auto precond = [&](const std::vector<double>& r) {
      auto z = tr->solve_shifted_laplacian(r, dt / dbar);
      for (double& v : z) v /= dbar;
      return z;
    };
    std::vector<double> b(N);
    for (std::size_t i = 0; i < N; ++i) b[i] = -F[i];
    std::vector<double> w(N, 0.0), r = b, z = precond(r), q = z;
    double rz = dot(r, z);
    const double bnorm = std::sqrt(dot(b, b));
    for (int k = 0; k < kCgMaxIter && std::sqrt(dot(r, r)) > 1e-15 * bnorm; ++k) {
      auto Aq = apply(q);
      const double alpha = rz / dot(q, Aq);
      for (std::size_t i = 0; i < N; ++i) {
        w[i] += alpha * q[i];
        r[i] -= alpha * Aq[i];
      }
      z = precond(r);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < N; ++i) q[i] = z[i] + beta * q[i];
    }
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = w[i] / kap[i];

    // Positivity line search, then backtracking on the residual.
    double lambda = 1.0;
    for (std::size_t i = 0; i < N; ++i)
      if (th[i] + v[i] < 0.1 * th[i]) lambda = std::min(lambda, 0.9 * th[i] / -v[i]);
    double res_trial = 0.0;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < N; ++i) trial[i] = th[i] + lambda * v[i];
      res_trial = residual(trial, Ftrial);
      if (res_trial < res || res_trial <= kNewtonTol) break;
      lambda *= 0.5;
    }
    th.swap(trial);
    F.swap(Ftrial);
    res = res_trial;
    if (res < 0.5 * best) {
      best = res;
      stalled = 0;
    } else if (++stalled >= 3 && res <= kNewtonAccept) {
      ++it;
      break;  // roundoff floor
    }
  }
  if (res > kNewtonAccept) {
    std::ostringstream os;
    os << "temperature Newton solve did not converge: residual " << res << " after " << it << " iterations";
    throw StepError(os.str());
  }
  long hits = 0;
  for (double& t : th)
    if (t < kThetaFloor) {
      t = kThetaFloor;
      ++hits;
    }
  if (report) *report = {it, res, hits};
  return ScalarField(g, std::move(th));
}

ScalarField advance_temperature(const State& s, const RegParams& reg, const EosParams& p, double dt,
                                NewtonReport* report) {
  return advance_temperature(s, s.rho, s.b, reg, p, dt, report);
}

std::vector<double> viscous_matrix(const ScalarField& theta, const GalerkinBasis& basis, const EosParams& p) {
  const int dim = basis.dim();
  std::vector<double> A(static_cast<std::size_t>(dim) * dim);
  std::vector<double> e(dim, 0.0);
  for (int j = 0; j < dim; ++j) {
    e[j] = 1.0;
    auto col = viscous_functional(viscous(disc::velocity_gradient(e, basis), theta, p), basis);
    for (int m = 0; m < dim; ++m) A[static_cast<std::size_t>(m) * dim + j] = col[m];
    e[j] = 0.0;
  }
  return A;
}

std::vector<double> advance_momentum(const State& prev, const ScalarField& rho_next, const ScalarField& b_next,
                                     const ScalarField& theta_next, const RegParams& reg, const EosParams& p,
                                     double dt, const VectorField* force) {
  const GalerkinBasis& basis = prev.basis;
  const int n = basis.n();
  const std::size_t N = prev.grid().size();
  auto du = disc::velocity_gradient(prev.a, basis);
  auto grad_rho = disc::gradient(rho_next);

  std::vector<double> P(N);
  double mu_bar = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = rho_next.v[i], b = b_next.v[i], th = theta_next.v[i];
    P[i] = thermo::pressure({r, th}, p).total() + 0.5 * b * b +
           reg.delta * (std::pow(r, reg.Gamma) + r * r + std::pow(b, reg.Gamma) + b * b);
    mu_bar = std::max(mu_bar, thermo::viscosity(th, p));
  }
  auto visc = viscous_functional(viscous(du, theta_next, p), basis);
  auto pres_x = disc::test_dx(P, basis);
  auto pres_y = disc::test_dy(P, basis);

  std::vector<double> D(n);
  for (int m = 0; m < n; ++m) D[m] = basis.gradient_norm2(m);

  auto M0 = disc::weighted_mass_matrix(prev.rho, basis);
  auto M1 = disc::weighted_mass_matrix(rho_next, basis);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Mn(M0.data(), n, n);
  Eigen::MatrixXd A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                          M1.data(), n, n) /
                      dt;
  for (int m = 0; m < n; ++m) A(m, m) += mu_bar * D[m];
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw StepError("momentum matrix is not positive definite");

  std::vector<double> out(2 * n);
  for (int c = 0; c < 2; ++c) {
    const auto& uc = c == 0 ? prev.u.x : prev.u.y;
    std::vector<double> fx(N), fy(N), corr(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double ru = prev.rho.v[i] * uc[i];
      fx[i] = ru * prev.u.x[i];
      fy[i] = ru * prev.u.y[i];
      corr[i] = reg.epsilon * (grad_rho.x[i] * du.d[c][0][i] + grad_rho.y[i] * du.d[c][1][i]);
    }
    auto cx = disc::test_dx(fx, basis);
    auto cy = disc::test_dy(fy, basis);
    auto ce = disc::test_value(corr, basis);
    std::vector<double> fb;
    if (force) fb = disc::test_value(c == 0 ? force->x : force->y, basis);
    Eigen::Map<const Eigen::VectorXd> an(prev.a.data() + c * n, n);
    Eigen::VectorXd rhs = Mn * an / dt;
    for (int m = 0; m < n; ++m) {
      const double pres = c == 0 ? pres_x[m] : pres_y[m];
      rhs(m) += cx[m] + cy[m] + pres - ce[m] - (visc[c * n + m] - mu_bar * D[m] * an(m));
      if (force) rhs(m) += fb[m];
    }
    Eigen::VectorXd sol = llt.solve(rhs);
    for (int m = 0; m < n; ++m) out[c * n + m] = sol(m);
  }
  return out;
}

std::vector<double> advance_momentum(const State& s, const RegParams& reg, const EosParams& p, double dt) {
  return advance_momentum(s, s.rho, s.b, s.theta, reg, p, dt);
}

// ---------------------------------------------------------------------------

StepResult step(const State& s, const RegParams& reg, const EosParams& p, double dt, const ForcingFn* forcing) {
  check_cfl(s.u, dt);
  std::optional<Forcing> F;
  if (forcing && *forcing) F = (*forcing)(s.t);

  StepResult res;
  State& out = res.state;
  out.basis = s.basis;
  std::vector<double> a_adv = s.a;
  VectorField u_adv = s.u;
  NewtonReport nr;
  ScalarField rho, b, theta;
  std::vector<double> a;
  for (int sweep = 0; sweep < std::max(1, reg.picard_sweeps); ++sweep) {
    if (sweep > 0) {
      u_adv = disc::reconstruct(a_adv, s.basis);
      check_cfl(u_adv, dt);
    }
    rho = advance_scalar(s.rho, u_adv, reg.epsilon, dt, F ? &F->rho : nullptr);
    b = advance_scalar(s.b, u_adv, reg.epsilon, dt, F ? &F->b : nullptr);
    long bad_rho = 0, bad_b = 0;
    for (double v : rho.v) bad_rho += !(v > 0.0);
    for (double v : b.v) bad_b += !(v > 0.0);
    if (bad_rho || bad_b) {
      std::ostringstream os;
      os << "loss of positivity at t = " << s.t + dt << ": " << bad_rho << " rho nodes, " << bad_b << " b nodes";
      throw StepError(os.str());
    }
    theta = advance_temperature(s, rho, b, reg, p, dt, &nr, F ? &F->theta : nullptr);
    a = advance_momentum(s, rho, b, theta, reg, p, dt, F ? &F->u : nullptr);
    a_adv = a;
  }

  out.t = s.t + dt;
  out.rho = std::move(rho);
  out.b = std::move(b);
  out.theta = std::move(theta);
  out.set_velocity(std::move(a));
  out.floors = s.floors;
  out.floors.theta += nr.floor_hits;
  out.steps = s.steps + 1;
  out.ledger = s.ledger;
  out.ledger.energy_source += dt * energy_source_rate(out.theta, reg);
  const double rate = entropy_source_rate(out, derivatives(out), reg, p);
  out.ledger.entropy_source += 0.5 * dt * (s.ledger.entropy_rate + rate);
  out.ledger.entropy_rate = rate;

  res.report.newton_iterations = nr.iterations;
  res.report.newton_residual = nr.residual;
  res.report.new_floor_violations = nr.floor_hits;
  res.report.cfl = std::isfinite(cfl_limit(s.u)) ? 0.5 * dt / cfl_limit(s.u) : 0.0;
  return res;
}

}  // namespace mhdw::solver
