#include "doctest.h"
#include "mhdw/diagnostics.hpp"
#include "mhdw/run.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

using namespace mhdw;
using namespace mhdw::diag;
using disc::Grid;
using disc::sample;
using solver::InitialData;
constexpr double pi = std::numbers::pi;

namespace {

solver::State uniform_state(const Grid& g, double rho, double b, double theta, const RegParams& reg) {
  auto init = solver::make_initial_data(disc::ScalarField(g, rho), disc::ScalarField(g, b),
                                        disc::ScalarField(g, theta), disc::VectorField(g));
  return solver::make_state(init, reg, EosParams{});
}

InitialData smooth(const Grid& g) {
  auto rho = sample(g, [](double x, double y) { return 1.0 + 0.2 * std::cos(pi * x) * std::cos(pi * y); });
  auto b = sample(g, [](double x, double) { return 1.0 + 0.3 * std::cos(pi * x); });
  auto th = sample(g, [](double, double y) { return 1.0 + 0.1 * std::cos(pi * y); });
  auto u = sample(
      g, [](double x, double y) { return 0.3 * std::sin(pi * x) * std::sin(pi * y); },
      [](double x, double y) { return 0.2 * std::sin(2 * pi * x) * std::sin(pi * y); });
  return solver::make_initial_data(rho, b, th, u);
}

RegParams reg005() {
  RegParams r;
  r.epsilon = r.delta = 0.05;
  return r;
}

std::vector<solver::State> trajectory(const Grid& g, double T, double dt) {
  RunHooks h;
  h.keep_all_states = true;
  return run(smooth(g), reg005(), EosParams{}, solver::Schedule{T, dt, 1}, h).snapshots;
}

// Composite Simpson rule, used as an independent oracle for L_k.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("report field order") {
  const auto& n = DiagnosticsReport::field_names();
  const char* expected[] = {"t",
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
  for (std::size_t i = 0; i < n.size(); ++i) CHECK(std::string(n[i]) == expected[i]);
}

TEST_CASE("report on a uniform state") {
  // Every gradient vanishes, so sigma reduces to delta/theta^3 times the area.
  Grid g{16, 16, 2.0, 1.0};
  RegParams reg;
  reg.delta = 0.03;
  const double theta = 1.3;
  auto s = uniform_state(g, 1.5, 3.0, theta, reg);
  auto r = report(s, reg, EosParams{});
  CHECK(r.sigma_integral == doctest::Approx(reg.delta * g.area() / std::pow(theta, 3)).epsilon(1e-13));
  CHECK(r.energy_balance_residual <= 1e-12);
  CHECK(r.entropy_balance_residual <= 1e-12);
  CHECK(r.domination_min == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.domination_max == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.mass_rho == doctest::Approx(3.0));
  CHECK(r.kinetic_energy == 0.0);
  CHECK(r.total_energy == doctest::Approx(r.kinetic_energy + r.magnetic_energy + r.internal_energy_total +
                                          r.artificial_energy));
  const double H = thermo::helmholtz({1.5, theta}, EosParams{}, reg.theta_bar);
  const double art = reg.delta * (std::pow(1.5, reg.Gamma) / (reg.Gamma - 1) + 2.25 + std::pow(3.0, reg.Gamma) /
                                  (reg.Gamma - 1) + 9.0);
  CHECK(r.helmholtz_functional == doctest::Approx((H + 4.5 + art) * g.area()).epsilon(1e-13));
}

TEST_CASE("report is pure and dissipation is nonnegative") {
  Grid g{32, 32, 1.0, 1.0};
  auto reg = reg005();
  auto s = solver::make_state(smooth(g), reg, EosParams{});
  auto a = report(s, reg, EosParams{}).values();
  auto b = report(s, reg, EosParams{}).values();
  CHECK(std::memcmp(a.data(), b.data(), sizeof(a)) == 0);
  for (double v : a) CHECK(std::isfinite(v));
  auto sig = sigma_density(s, reg, EosParams{});
  CHECK(sig.min() >= -1e-12);
}

TEST_CASE("entropy balance window") {
  Grid g{16, 16, 1.0, 1.0};
  RegParams reg;
  reg.epsilon = reg.delta = 0.01;
  auto s = uniform_state(g, 1.0, 1.0, 1.0, reg);
  std::vector<solver::State> w{s};
  for (int k = 0; k < 3; ++k) w.push_back(solver::step(w.back(), reg, EosParams{}, 0.01).state);
  CHECK(entropy_balance_residual(w, reg, EosParams{}) <= 1e-12);
  CHECK_THROWS_AS(entropy_balance_residual(std::span(w).first(2), reg, EosParams{}), std::invalid_argument);
}

TEST_CASE("cut-off functions") {
  for (double k : {1.0, 2.5, 10.0}) {
    CHECK(cutoff_T(0.5 * k, k) == 0.5 * k);
    CHECK(cutoff_T(k, k) == doctest::Approx(k));
    CHECK(cutoff_T(3.0 * k, k) == doctest::Approx(2.0 * k));
    CHECK(cutoff_T(7.0 * k, k) == 2.0 * k);
    CHECK(cutoff_L(1.0, k) == 0.0);
    // Monotone, concave and C^1 across the joins.
    double prev = -1.0;
    const double h = 1e-3 * k;
    for (double z = h; z < 4.0 * k; z += h) {
      const double t = cutoff_T(z, k);
      CHECK(t >= prev);
      prev = t;
      const double d2 = cutoff_T(z + h, k) - 2.0 * t + cutoff_T(z - h, k);
      CHECK(d2 <= 1e-12 * k);
      CHECK(cutoff_T_prime(z, k) == doctest::Approx((cutoff_T(z + h, k) - cutoff_T(z - h, k)) / (2 * h)).epsilon(1e-3));
    }
    for (double rho : {0.2, 0.9, 1.7, 2.0 * k, 2.9 * k, 5.0 * k, 20.0 * k}) {
      const double lo = std::min(1.0, rho), hi = std::max(1.0, rho);
      const double q = simpson([&](double z) { return cutoff_T(z, k) / (z * z); }, lo, hi, 20000);
      CHECK(cutoff_L(rho, k) == doctest::Approx(rho >= 1.0 ? q : -q).epsilon(1e-9));
    }
  }
  CHECK(std::isinf(cutoff_L(0.0, 1.0)));
  CHECK(cutoff_L(0.0, 1.0) < 0.0);
  CHECK_THROWS_AS(cutoff_T(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cutoff_L(-1.0, 1.0), DomainError);
}

TEST_CASE("renormalized residual reduces to continuity above max rho") {
  auto w = trajectory(Grid{16, 16, 1.0, 1.0}, 0.03, 0.01);
  auto reg = reg005();
  const double c = continuity_residual(w, Which::Rho, reg);
  CHECK(std::abs(renormalized_residual(w, 10.0, Which::Rho, reg) - c) <= 1e-12);
  CHECK(std::abs(renormalized_residual(w, 10.0, Which::B, reg) - continuity_residual(w, Which::B, reg)) <= 1e-12);
  CHECK(std::isfinite(renormalized_residual(w, 1.0, Which::Rho, reg)));

  Grid g{16, 16, 1.0, 1.0};
  RegParams eq;
  eq.epsilon = eq.delta = 0.01;
  std::vector<solver::State> u{uniform_state(g, 1.0, 1.0, 1.0, eq)};
  for (int k = 0; k < 2; ++k) u.push_back(solver::step(u.back(), eq, EosParams{}, 0.01).state);
  CHECK(renormalized_residual(u, 1.0, Which::Rho, eq) == 0.0);
}

TEST_CASE("test-function library") {
  auto lib = test_library(2.0, 1.0, 0.5);
  CHECK(lib.size() == 12);
  Grid g{16, 16, 2.0, 1.0};
  int vec = 0, nonneg = 0;
  for (const auto& f : lib) {
    CHECK_NOTHROW(validate_test_function(f, g));
    vec += f.kind == TestFunction::Kind::Vector;
    nonneg += f.nonneg;
    CHECK(f.psi(0.5) == 0.0);
  }
  CHECK(vec == 3);
  CHECK(nonneg == 5);

  auto bad = lib[1];  // cos_x goes negative
  bad.nonneg = true;
  CHECK_THROWS_AS(validate_test_function(bad, g), std::invalid_argument);
  auto not_compact = lib[1];
  not_compact.kind = TestFunction::Kind::Vector;
  not_compact.phi2 = lib[1].phi;
  not_compact.requires_compact_spatial_support = true;
  CHECK_THROWS_AS(validate_test_function(not_compact, g), std::invalid_argument);
  auto late = lib[0];
  late.t_end = 0.25;
  CHECK_THROWS_AS(validate_test_function(late, g), std::invalid_argument);
}

TEST_CASE("weak residuals of space-constant tests are mass defects") {
  Grid g{16, 16, 1.0, 1.0};
  const double T = 0.05;
  auto w = trajectory(g, T, 0.01);
  auto lib = test_library(1.0, 1.0, T);
  auto rows = weak_residuals(w, lib, reg005(), EosParams{});
  bool saw_energy = false;
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.residual));
    if (r.test == "constant" && (r.equation == Equation::Continuity || r.equation == Equation::Magnetic))
      CHECK(std::abs(r.residual) <= 1e-9);
    if (r.equation == Equation::Entropy) CHECK(r.residual <= 1e-6);
    saw_energy = saw_energy || r.equation == Equation::Energy;
  }
  CHECK(saw_energy);
  auto bad = lib;
  bad[0].nonneg = true;
  bad[1].nonneg = true;
  CHECK_THROWS_AS(weak_residuals(w, bad, reg005(), EosParams{}), std::invalid_argument);
}

TEST_CASE("Korn and Poincare ratios") {
  Grid g{32, 32, 1.0, 1.0};
  auto basis = disc::build_basis(g, 4);
  // Single no-slip mode in one component: grad U : grad^t U = (div U)^2 pointwise,
  // so the symmetric trace-free part has exactly twice the squared norm.
  std::vector<double> a(basis.dim(), 0.0);
  a[2] = 1.0;
  CHECK(korn_ratio(a, basis) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::isnan(korn_ratio(std::vector<double>(basis.dim(), 0.0), basis)));
  // Constant scalar: no gradient, the norm on the left half is sqrt(1/2) of the full norm.
  CHECK(poincare_ratio(disc::ScalarField(g, 3.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("inequality constants") {
  CHECK_THROWS_AS(inequality_constants(Grid{16, 16, 1.0, 1.0}, 99, 1), std::invalid_argument);
  auto a = inequality_constants(Grid{32, 32, 1.0, 1.0}, 100, 7);
  auto b = inequality_constants(Grid{32, 32, 1.0, 1.0}, 100, 7);
  CHECK(a.korn_ratio_max == b.korn_ratio_max);
  CHECK(a.poincare_ratio_max == b.poincare_ratio_max);
  CHECK(a.korn_samples == 100);
  CHECK(a.poincare_samples == 100);
  CHECK(std::isfinite(a.korn_ratio_max));
  CHECK(a.poincare_ratio_max >= std::sqrt(2.0) - 1e-12);
  CHECK(a.coercivity_min_margin >= 0.0);
}
