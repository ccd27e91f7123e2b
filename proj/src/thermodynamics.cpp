#include "mhdw/thermodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mhdw::thermo {

namespace {

void require_positive(ThermoPoint pt, const char* where) {
  if (!(pt.rho > 0.0) || !(pt.theta > 0.0)) {
    std::ostringstream os;
    os << where << ": requires rho > 0 and theta > 0 (got rho=" << pt.rho
       << ", theta=" << pt.theta << ")";
    throw DomainError(os.str());
  }
}

// Fourth-order central difference of f at x.
template <class F>
double central_diff(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace

void EosParams::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (!(gamma > 1.0)) fail("eos: gamma > 1");
  if (!(a > 0.0)) fail("eos: a > 0");
  if (!(c_v > 0.0)) fail("eos: c_v > 0");
  if (!(mu0 > 0.0) || !(mu1 > 0.0)) fail("eos: mu0, mu1 > 0");
  if (!(kappa0 > 0.0) || !(kappa2 > 0.0) || !(kappa3 > 0.0)) fail("eos: kappa0, kappa2, kappa3 > 0");
}

Split pressure(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "pressure");
  const double t4 = std::pow(pt.theta, 4);
  return {pt.rho * pt.theta + std::pow(pt.rho, p.gamma), p.a / 3.0 * t4};
}

Split internal_energy(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "internal_energy");
  const double t4 = std::pow(pt.theta, 4);
  return {std::pow(pt.rho, p.gamma - 1.0) / (p.gamma - 1.0) + p.c_v * pt.theta, p.a * t4 / pt.rho};
}

Split entropy(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "entropy");
  const double t3 = pt.theta * pt.theta * pt.theta;
  return {p.c_v * std::log(pt.theta) - std::log(pt.rho), 4.0 * p.a / 3.0 * t3 / pt.rho};
}

double dpressure_matter_drho(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "dpressure_matter_drho");
  return pt.theta + p.gamma * std::pow(pt.rho, p.gamma - 1.0);
}

double dpressure_drho(ThermoPoint pt, const EosParams& p) { return dpressure_matter_drho(pt, p); }

double denergy_dtheta(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "denergy_dtheta");
  return p.c_v + 4.0 * p.a * pt.theta * pt.theta * pt.theta / pt.rho;
}

double denergy_drho(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "denergy_drho");
  return std::pow(pt.rho, p.gamma - 2.0) - p.a * std::pow(pt.theta, 4) / (pt.rho * pt.rho);
}

double dentropy_drho(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "dentropy_drho");
  return -1.0 / pt.rho - 4.0 * p.a / 3.0 * std::pow(pt.theta, 3) / (pt.rho * pt.rho);
}

double dentropy_dtheta(ThermoPoint pt, const EosParams& p) {
  require_positive(pt, "dentropy_dtheta");
  return p.c_v / pt.theta + 4.0 * p.a * pt.theta * pt.theta / pt.rho;
}

double gibbs_residual(ThermoPoint pt, const EosParams& p, double h) {
  require_positive(pt, "gibbs_residual");
  if (!(h > 0.0)) throw DomainError("gibbs_residual: step h must be positive");
  if (pt.rho - 2 * h <= 0.0 || pt.theta - 2 * h <= 0.0) {
    std::ostringstream os;
    os << "gibbs_residual: stencil of step " << h << " leaves the domain at rho=" << pt.rho
       << ", theta=" << pt.theta;
    throw DomainError(os.str());
  }
  const double th = pt.theta;
  const double rho = pt.rho;
  auto e_of_rho = [&](double r) { return internal_energy({r, th}, p).total(); };
  auto s_of_rho = [&](double r) { return entropy({r, th}, p).total(); };
  auto e_of_theta = [&](double t) { return internal_energy({rho, t}, p).total(); };
  auto s_of_theta = [&](double t) { return entropy({rho, t}, p).total(); };

  const double pr = pressure(pt, p).total();
  // theta ds/drho = de/drho + p d(1/rho)/drho, with d(1/rho)/drho = -1/rho^2
  const double r_rho = th * central_diff(s_of_rho, rho, h) - central_diff(e_of_rho, rho, h) +
                       pr / (rho * rho);
  const double r_theta = th * central_diff(s_of_theta, th, h) - central_diff(e_of_theta, th, h);
  const double scale = std::max(1.0, std::abs(internal_energy(pt, p).total()));
  return std::max(std::abs(r_rho), std::abs(r_theta)) / scale;
}

StabilityPartials stability_check(ThermoPoint pt, const EosParams& p, double h) {
  require_positive(pt, "stability_check");
  if (!(h > 0.0) || pt.rho - 2 * h <= 0.0 || pt.theta - 2 * h <= 0.0)
    throw DomainError("stability_check: finite-difference stencil leaves the domain");
  StabilityPartials out{};
  out.dp_drho = dpressure_drho(pt, p);
  out.de_dtheta = denergy_dtheta(pt, p);
  out.dp_drho_fd = central_diff([&](double r) { return pressure({r, pt.theta}, p).total(); }, pt.rho, h);
  out.de_dtheta_fd =
      central_diff([&](double t) { return internal_energy({pt.rho, t}, p).total(); }, pt.theta, h);
  return out;
}

double helmholtz(ThermoPoint pt, const EosParams& p, double theta_bar) {
  if (!(theta_bar > 0.0)) throw DomainError("helmholtz: theta_bar must be positive");
  return pt.rho * internal_energy(pt, p).total() - theta_bar * pt.rho * entropy(pt, p).total();
}

double helmholtz_drho(ThermoPoint pt, const EosParams& p, double theta_bar) {
  require_positive(pt, "helmholtz_drho");
  // d(rho e)/drho = gamma rho^(gamma-1)/(gamma-1) + c_v theta; d(rho s)/drho = s_M - 1
  const double d_rho_e = p.gamma * std::pow(pt.rho, p.gamma - 1.0) / (p.gamma - 1.0) + p.c_v * pt.theta;
  const double d_rho_s = entropy(pt, p).matter - 1.0;
  return d_rho_e - theta_bar * d_rho_s;
}

CoercivitySides helmholtz_coercivity(ThermoPoint pt, const EosParams& p, double theta_bar,
                                     double rho_bar) {
  const ThermoPoint ref{rho_bar, 2.0 * theta_bar};
  const double anchor = (pt.rho - rho_bar) * helmholtz_drho(ref, p, 2.0 * theta_bar) +
                        helmholtz(ref, p, 2.0 * theta_bar);
  const double rho_e = pt.rho * internal_energy(pt, p).total();
  const double rho_abs_s = pt.rho * std::abs(entropy(pt, p).total());
  return {helmholtz(pt, p, theta_bar), 0.25 * (rho_e + theta_bar * rho_abs_s) - std::abs(anchor)};
}

double viscosity(double theta, const EosParams& p) {
  if (!(theta > 0.0)) throw DomainError("viscosity: theta must be positive");
  return p.mu0 + p.mu1 * theta;
}

double conductivity(double theta, const EosParams& p) {
  if (!(theta > 0.0)) throw DomainError("conductivity: theta must be positive");
  return p.kappa0 + p.kappa2 * theta * theta + p.kappa3 * theta * theta * theta;
}

double kappa_delta(double theta, const EosParams& p, double delta, double Gamma) {
  return conductivity(theta, p) + delta * (std::pow(theta, Gamma) + 1.0 / theta);
}

double kappa_delta_prime(double theta, const EosParams& p, double delta, double Gamma) {
  if (!(theta > 0.0)) throw DomainError("kappa_delta_prime: theta must be positive");
  return 2.0 * p.kappa2 * theta + 3.0 * p.kappa3 * theta * theta +
         delta * (Gamma * std::pow(theta, Gamma - 1.0) - 1.0 / (theta * theta));
}

double K_delta(double theta, const EosParams& p, double delta, double Gamma) {
  if (!(theta > 0.0)) throw DomainError("K_delta: theta must be positive");
  const double t3 = theta * theta * theta;
  return p.kappa0 * (theta - 1.0) + p.kappa2 * (t3 - 1.0) / 3.0 + p.kappa3 * (t3 * theta - 1.0) / 4.0 +
         delta * ((std::pow(theta, Gamma + 1.0) - 1.0) / (Gamma + 1.0) + std::log(theta));
}

Transport transport(double theta, const EosParams& p, double delta, double Gamma) {
  if (!(theta > 0.0)) throw DomainError("transport: theta must be positive");
  if (delta < 0.0) throw DomainError("transport: delta must be non-negative");
  if (Gamma < 2.0) throw DomainError("transport: Gamma must be at least 2");
  return {viscosity(theta, p), conductivity(theta, p), kappa_delta(theta, p, delta, Gamma),
          K_delta(theta, p, delta, Gamma)};
}

Tensor2 viscous_stress(const Tensor2& g, double theta, const EosParams& p) {
  const double mu = viscosity(theta, p);
  const double div = g[0][0] + g[1][1];
  Tensor2 s{};
  s[0][0] = mu * (2.0 * g[0][0] - div);
  s[1][1] = mu * (2.0 * g[1][1] - div);
  s[0][1] = s[1][0] = mu * (g[0][1] + g[1][0]);
  return s;
}

Vec2 heat_flux(const Vec2& grad_theta, double theta, const EosParams& p) {
  const double k = conductivity(theta, p);
  return {-k * grad_theta[0], -k * grad_theta[1]};
}

}  // namespace mhdw::thermo
