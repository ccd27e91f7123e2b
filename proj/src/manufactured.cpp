#include "mhdw/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mhdw::mms {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;
}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.t + b.t, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
Jet operator-(const Jet& a) { return {-a.v, -a.t, -a.x, -a.y, -a.xx, -a.xy, -a.yy}; }
Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.t * b.v + a.v * b.t,
          a.x * b.v + a.v * b.x,
          a.y * b.v + a.v * b.y,
          a.xx * b.v + 2 * a.x * b.x + a.v * b.xx,
          a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
          a.yy * b.v + 2 * a.y * b.y + a.v * b.yy};
}
Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }
Jet operator+(const Jet& a, double c) { return a + Jet::constant(c); }
Jet operator+(double c, const Jet& a) { return a + c; }
Jet operator-(const Jet& a, double c) { return a + (-c); }
Jet operator-(double c, const Jet& a) { return (-a) + c; }
Jet operator*(const Jet& a, double c) { return {a.v * c, a.t * c, a.x * c, a.y * c, a.xx * c, a.xy * c, a.yy * c}; }
Jet operator*(double c, const Jet& a) { return a * c; }
Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }

Jet chain(const Jet& a, double f, double df, double d2f) {
  return {f,
          df * a.t,
          df * a.x,
          df * a.y,
          d2f * a.x * a.x + df * a.xx,
          d2f * a.x * a.y + df * a.xy,
          d2f * a.y * a.y + df * a.yy};
}

Jet pow(const Jet& a, double e) {
  const double f = std::pow(a.v, e);
  return chain(a, f, e * std::pow(a.v, e - 1.0), e * (e - 1.0) * std::pow(a.v, e - 2.0));
}
Jet exp(const Jet& a) {
  const double f = std::exp(a.v);
  return chain(a, f, f, f);
}
Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

Jet dx(const Jet& a) { return {a.x, kNaN, a.xx, a.xy, kNaN, kNaN, kNaN}; }
Jet dy(const Jet& a) { return {a.y, kNaN, a.xy, a.yy, kNaN, kNaN, kNaN}; }

Jet coord_x(double x) { return {x, 0, 1, 0, 0, 0, 0}; }
Jet coord_y(double y) { return {y, 0, 0, 1, 0, 0, 0}; }
Jet coord_t(double t) { return {t, 1, 0, 0, 0, 0, 0}; }

void check_boundary_conditions(const ManufacturedSolution& sol, double lx, double ly, double t) {
  constexpr int kSamples = 17;
  constexpr double kTol = 1e-10;
  std::ostringstream os;
  auto check = [&](double x, double y, bool vertical_edge) {
    for (auto* f : {&sol.u1, &sol.u2}) {
      const double v = (*f)(t, x, y).v;
      if (std::abs(v) > kTol) os << "velocity " << v << " at boundary point (" << x << ", " << y << "); ";
    }
    for (auto* f : {&sol.rho, &sol.b, &sol.theta}) {
      const Jet j = (*f)(t, x, y);
      const double dn = vertical_edge ? j.x : j.y;
      if (std::abs(dn) > kTol * std::max(1.0, std::abs(j.v)))
        os << "normal derivative " << dn << " at boundary point (" << x << ", " << y << "); ";
    }
  };
  for (int i = 0; i <= kSamples; ++i) {
    const double sx = lx * i / kSamples, sy = ly * i / kSamples;
    check(0.0, sy, true);
    check(lx, sy, true);
    check(sx, 0.0, false);
    check(sx, ly, false);
  }
  if (!os.str().empty()) throw std::invalid_argument("manufactured solution violates boundary conditions: " + os.str());
}

solver::Forcing manufactured_forcing(const ManufacturedSolution& sol, double t, const disc::Grid& g,
                                     const solver::RegParams& reg, const thermo::EosParams& p) {
  solver::Forcing F{disc::ScalarField(g), disc::ScalarField(g), disc::ScalarField(g), disc::VectorField(g)};
  const double eps = reg.epsilon, del = reg.delta, G = reg.Gamma;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      const std::size_t k = g.index(i, j);
      const Jet R = sol.rho(t, x, y), B = sol.b(t, x, y), Th = sol.theta(t, x, y);
      const Jet U[2] = {sol.u1(t, x, y), sol.u2(t, x, y)};

      auto continuity = [&](const Jet& f) {
        return f.t + (f * U[0]).x + (f * U[1]).y - eps * (f.xx + f.yy);
      };
      F.rho.v[k] = continuity(R);
      F.b.v[k] = continuity(B);

      const Jet dU[2][2] = {{dx(U[0]), dy(U[0])}, {dx(U[1]), dy(U[1])}};  // dU[c][a] = d_a u_c
      const Jet div = dU[0][0] + dU[1][1];
      const Jet mu = p.mu0 + p.mu1 * Th;
      Jet S[2][2];
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a) S[c][a] = mu * (dU[c][a] + dU[a][c] - (c == a ? div : Jet{}));

      const Jet P = R * Th + pow(R, p.gamma) + (p.a / 3.0) * pow(Th, 4.0) + 0.5 * B * B +
                    del * (pow(R, G) + R * R + pow(B, G) + B * B);
      for (int c = 0; c < 2; ++c) {
        const Jet mom = R * U[c];
        double f = mom.t + (mom * U[0]).x + (mom * U[1]).y;
        f += c == 0 ? P.x : P.y;
        f -= S[c][0].x + S[c][1].y;
        f += eps * (R.x * U[c].x + R.y * U[c].y);
        (c == 0 ? F.u.x : F.u.y)[k] = f;
      }

      const Jet RE = pow(R, p.gamma) / (p.gamma - 1.0) + p.c_v * R * Th + p.a * pow(Th, 4.0);
      const double th = Th.v;
      const Jet K = chain(Th, thermo::K_delta(th, p, del, G), thermo::kappa_delta(th, p, del, G),
                          thermo::kappa_delta_prime(th, p, del, G));
      double contraction = 0.0;
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a) contraction += S[c][a].v * dU[c][a].v;
      const double pres = thermo::pressure({R.v, th}, p).total();
      const double gb2 = B.x * B.x + B.y * B.y, gr2 = R.x * R.x + R.y * R.y;
      const double heating = eps * gb2 + eps * del * ((G * std::pow(R.v, G - 2.0) + 2.0) * gr2 +
                                                      (G * std::pow(B.v, G - 2.0) + 2.0) * gb2);
      F.theta.v[k] = RE.t + (RE * U[0]).x + (RE * U[1]).y - (K.xx + K.yy) - contraction + pres * div.v - heating -
                     del / (th * th) + eps * std::pow(th, 5);
    }
  return F;
}

solver::ForcingFn forcing_function(const ManufacturedSolution& sol, const disc::Grid& g,
                                   const solver::RegParams& reg, const thermo::EosParams& p) {
  return [=](double t) { return manufactured_forcing(sol, t, g, reg, p); };
}

solver::InitialData sample_solution(const ManufacturedSolution& sol, const disc::Grid& g, double t) {
  auto value = [&](const JetField& f) { return disc::sample(g, [&](double x, double y) { return f(t, x, y).v; }); };
  auto u = disc::sample(
      g, [&](double x, double y) { return sol.u1(t, x, y).v; }, [&](double x, double y) { return sol.u2(t, x, y).v; });
  return solver::make_initial_data(value(sol.rho), value(sol.b), value(sol.theta), std::move(u));
}

double solution_error(const solver::State& s, const ManufacturedSolution& sol) {
  const auto exact = sample_solution(sol, s.grid(), s.t);
  auto rel = [](const std::vector<double>& a, const std::vector<double>& e) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - e[i]) * (a[i] - e[i]);
      den += e[i] * e[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
  };
  double err = std::max({rel(s.rho.v, exact.rho0.v), rel(s.b.v, exact.b0.v), rel(s.theta.v, exact.theta0.v)});
  std::vector<double> u(s.u.x), ue(exact.u0.x);
  u.insert(u.end(), s.u.y.begin(), s.u.y.end());
  ue.insert(ue.end(), exact.u0.y.begin(), exact.u0.y.end());
  return std::max(err, rel(u, ue));
}

namespace {

Jet cospi(double k, const Jet& z, double L) { return cos(z * (k * kPi / L)); }
Jet sinpi(double k, const Jet& z, double L) { return sin(z * (k * kPi / L)); }

}  // namespace

MmsCase steady_case() {
  MmsCase c;
  c.reg.epsilon = 0.05;
  c.reg.delta = 0.05;
  c.reg.n = 16;
  auto rho = [](double, double x, double y) {
    return 2.0 + 0.1 * cospi(1, coord_x(x), 1.0) * cospi(1, coord_y(y), 1.0);
  };
  c.sol.rho = rho;
  c.sol.b = rho;
  c.sol.theta = [](double, double, double) { return Jet::constant(1.0); };
  c.sol.u1 = [](double, double x, double y) {
    return 0.05 * sinpi(1, coord_x(x), 1.0) * sinpi(1, coord_y(y), 1.0);
  };
  c.sol.u2 = [](double, double x, double y) {
    return -0.04 * sinpi(2, coord_x(x), 1.0) * sinpi(1, coord_y(y), 1.0);
  };
  return c;
}

MmsCase unsteady_case() {
  MmsCase c;
  c.reg.epsilon = 0.05;
  c.reg.delta = 0.05;
  c.reg.n = 16;
  c.sol.rho = [](double t, double x, double y) {
    const Jet T = coord_t(t);
    return 2.0 + 0.1 * cospi(1, coord_x(x), 1.0) * cospi(1, coord_y(y), 1.0) * (1.0 + 0.5 * sin(2.0 * T));
  };
  c.sol.b = [](double t, double x, double y) {
    const Jet T = coord_t(t);
    return 1.5 + 0.1 * cospi(1, coord_x(x), 1.0) * cos(T) + 0.05 * cospi(2, coord_y(y), 1.0);
  };
  c.sol.theta = [](double t, double, double y) {
    const Jet T = coord_t(t);
    return 1.0 + 0.05 * cospi(1, coord_y(y), 1.0) * (1.0 + 0.5 * sin(3.0 * T));
  };
  c.sol.u1 = [](double t, double x, double y) {
    return 0.05 * sinpi(1, coord_x(x), 1.0) * sinpi(1, coord_y(y), 1.0) * cos(2.0 * coord_t(t));
  };
  c.sol.u2 = [](double t, double x, double y) {
    return 0.04 * sinpi(2, coord_x(x), 1.0) * sinpi(1, coord_y(y), 1.0) * (1.0 + coord_t(t));
  };
  return c;
}

double OrderStudy::min_order() const {
  if (order.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(order.begin(), order.end());
}

namespace {

double run_case(const MmsCase& c, const disc::Grid& g, double dt, double t_final) {
  check_boundary_conditions(c.sol, c.lx, c.ly);
  auto state = solver::make_state(sample_solution(c.sol, g, 0.0), c.reg, c.eos);
  auto forcing = forcing_function(c.sol, g, c.reg, c.eos);
  const long n = solver::Schedule{t_final, dt, 1}.steps();
  for (long k = 0; k < n; ++k) state = solver::step(state, c.reg, c.eos, dt, &forcing).state;
  return solution_error(state, c.sol);
}

void fill_orders(OrderStudy& s) {
  for (std::size_t i = 1; i < s.error.size(); ++i)
    s.order.push_back(std::log(s.error[i - 1] / s.error[i]) / std::log(s.parameter[i - 1] / s.parameter[i]));
}

}  // namespace

OrderStudy spatial_order(const MmsCase& c, const std::vector<int>& grids, double dt, double t_final) {
  OrderStudy s;
  for (int n : grids) {
    disc::Grid g{n, n, c.lx, c.ly};
    s.parameter.push_back(std::min(g.hx(), g.hy()));
    s.error.push_back(run_case(c, g, dt, t_final));
  }
  fill_orders(s);
  return s;
}

OrderStudy temporal_order(const MmsCase& c, int grid, const std::vector<double>& dts, double t_final) {
  OrderStudy s;
  disc::Grid g{grid, grid, c.lx, c.ly};
  for (double dt : dts) {
    s.parameter.push_back(dt);
    s.error.push_back(run_case(c, g, dt, t_final));
  }
  fill_orders(s);
  return s;
}

}  // namespace mhdw::mms
