#include "doctest.h"
#include "mhdw/thermodynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mhdw;
using namespace mhdw::thermo;

namespace {

EosParams radiative() {
  EosParams p;
  p.a = 3.0;
  return p;
}

std::vector<double> sample_axis() {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(0.1 + i * 0.1);
  return v;
}

}  // namespace

TEST_CASE("pressure closed form") {
  auto p = radiative();
  CHECK(pressure({1, 1}, p).total() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(pressure({8, 2}, p).total() == doctest::Approx(64.0).epsilon(1e-14));
  CHECK(pressure({1, 1}, p).radiation == p.a / 3.0);
  CHECK_THROWS_AS(pressure({0, 1}, p), DomainError);
  CHECK_THROWS_AS(pressure({1, -1}, p), DomainError);
}

TEST_CASE("internal energy and entropy closed forms") {
  auto p = radiative();
  CHECK(internal_energy({1, 1}, p).total() == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(internal_energy({8, 1}, p).total() == doctest::Approx(7.375).epsilon(1e-14));
  CHECK(internal_energy({1, 2}, p).total() == doctest::Approx(51.5).epsilon(1e-14));
  const double e = std::numbers::e;
  CHECK(entropy({1, 1}, p).total() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(entropy({e, 1}, p).total() == doctest::Approx(-1.0 + 4.0 / e).epsilon(1e-14));
  CHECK(entropy({1, e}, p).total() == doctest::Approx(1.0 + 4.0 * e * e * e).epsilon(1e-14));
}

TEST_CASE("gibbs residual on the sample grid") {
  EosParams p;
  double worst = 0.0;
  for (double r : sample_axis())
    for (double t : sample_axis()) worst = std::max(worst, gibbs_residual({r, t}, p, 1e-4));
  CHECK(worst <= 1e-6);
  CHECK(gibbs_residual({1, 1}, radiative(), 1e-4) <= 1e-6);
  CHECK(gibbs_residual({2, 0.5}, radiative(), 1e-4) <= 1e-6);
  CHECK_THROWS_AS(gibbs_residual({1, 1}, p, 0.5), DomainError);
}

TEST_CASE("stability partials") {
  auto p = radiative();
  auto s = stability_check({1, 1}, p, 1e-4);
  CHECK(s.dp_drho == doctest::Approx(8.0 / 3.0));
  CHECK(s.de_dtheta == doctest::Approx(13.0));
  CHECK(s.dp_drho_fd == doctest::Approx(s.dp_drho).epsilon(1e-9));
  CHECK(s.de_dtheta_fd == doctest::Approx(s.de_dtheta).epsilon(1e-9));
  for (double r : sample_axis())
    for (double t : sample_axis()) CHECK(stability_check({r, t}, EosParams{}, 1e-4).stable());
}

TEST_CASE("helmholtz minimum at the reference temperature") {
  auto p = radiative();
  CHECK(helmholtz({1, 1}, p, 1.0) == doctest::Approx(1.5));
  CHECK(helmholtz({1, 1.1}, p, 1.0) >= helmholtz({1, 1}, p, 1.0));
  CHECK(helmholtz({1, 0.9}, p, 1.0) >= helmholtz({1, 1}, p, 1.0));
  EosParams d;
  for (double rho : {0.1, 1.0, 7.3}) {
    for (double tb : {0.5, 1.0, 4.0}) {
      double prev = helmholtz({rho, 0.01}, d, tb);
      for (double t = 0.02; t < 10.0; t += 0.01) {
        const double h = helmholtz({rho, t}, d, tb);
        if (t < tb - 1e-9) CHECK(h <= prev + 1e-12);
        if (t > tb + 0.01 + 1e-9) CHECK(h >= prev - 1e-12);
        prev = h;
      }
    }
  }
}

TEST_CASE("helmholtz derivative matches finite differences") {
  EosParams p;
  for (double rho : {0.3, 1.0, 4.0})
    for (double t : {0.5, 2.0}) {
      const double h = 1e-5;
      const double fd =
          (helmholtz({rho + h, t}, p, 1.3) - helmholtz({rho - h, t}, p, 1.3)) / (2 * h);
      CHECK(helmholtz_drho({rho, t}, p, 1.3) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("helmholtz coercivity on the sample grid") {
  EosParams p;
  double margin = 1e300;
  for (double r : sample_axis())
    for (double t : sample_axis()) margin = std::min(margin, helmholtz_coercivity({r, t}, p, 1.0, 1.0).margin());
  CHECK(margin >= 0.0);
  CHECK(helmholtz_coercivity({1, 1}, radiative(), 1.0, 1.0).margin() >= 0.0);
}

TEST_CASE("transport coefficients") {
  EosParams p;
  auto tr = transport(2.0, p, 0.0, 8.0);
  CHECK(tr.mu == 3.0);
  CHECK(tr.kappa == 13.0);
  CHECK(tr.K_delta == doctest::Approx(85.0 / 12.0).epsilon(1e-15));
  CHECK(K_delta(1.0, p, 0.3, 8.0) == 0.0);
  CHECK_THROWS_AS(transport(0.0, p, 0.0, 8.0), DomainError);

  // K_delta' = kappa_delta, checked by a Simpson-rule oracle on [1, theta]
  for (double t : {0.2, 0.7, 1.9, 3.5}) {
    const int n = 2000;
    const double h = (t - 1.0) / n;
    double s = kappa_delta(1.0, p, 0.1, 8.0) + kappa_delta(t, p, 0.1, 8.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * kappa_delta(1.0 + i * h, p, 0.1, 8.0);
    CHECK(K_delta(t, p, 0.1, 8.0) == doctest::Approx(s * h / 3.0).epsilon(1e-9));
  }
  double prev = K_delta(0.05, p, 0.1, 8.0);
  for (double t = 0.1; t < 5.0; t += 0.05) {
    const double k = K_delta(t, p, 0.1, 8.0);
    CHECK(k > prev);
    prev = k;
  }
  const double h = 1e-6;
  CHECK(kappa_delta_prime(1.7, p, 0.1, 8.0) ==
        doctest::Approx((kappa_delta(1.7 + h, p, 0.1, 8.0) - kappa_delta(1.7 - h, p, 0.1, 8.0)) / (2 * h))
            .epsilon(1e-7));
}

TEST_CASE("viscous stress is symmetric, trace-free and dissipative") {
  EosParams p;
  auto s0 = viscous_stress({{{1, 0}, {0, 1}}}, 1.0, p);
  for (auto& row : s0)
    for (double v : row) CHECK(v == 0.0);
  p.mu1 = 0.0;
  auto s1 = viscous_stress({{{0, 1}, {0, 0}}}, 1.0, p);
  CHECK(s1[0][0] == 0.0);
  CHECK(s1[0][1] == 1.0);
  CHECK(s1[1][0] == 1.0);
  CHECK(s1[1][1] == 0.0);

  EosParams d;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    Tensor2 G{{{g(rng), g(rng)}, {g(rng), g(rng)}}};
    const double th = 0.1 + std::abs(g(rng));
    auto S = viscous_stress(G, th, d);
    CHECK(S[0][1] == S[1][0]);
    CHECK(std::abs(S[0][0] + S[1][1]) <= 1e-14 * (1 + std::abs(S[0][0])));
    double contraction = 0.0, sym2 = 0.0;
    const double div = G[0][0] + G[1][1];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        contraction += S[a][b] * G[a][b];
        const double m = G[a][b] + G[b][a] - (a == b ? div : 0.0);
        sym2 += m * m;
      }
    CHECK(contraction >= 0.0);
    CHECK(contraction == doctest::Approx(0.5 * viscosity(th, d) * sym2).epsilon(1e-12));
  }
}

TEST_CASE("heat flux") {
  EosParams p;
  auto q0 = heat_flux({0, 0}, 2.0, p);
  CHECK(q0[0] == 0.0);
  CHECK(q0[1] == 0.0);
  auto q = heat_flux({1, 0}, 1.0, p);
  CHECK(q[0] == -3.0);
  CHECK(q[1] == 0.0);
  auto q2 = heat_flux({0.3, -2.0}, 1.4, p);
  CHECK(q2[0] * 0.3 + q2[1] * -2.0 <= 0.0);
}

TEST_CASE("parameter validation") {
  EosParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
