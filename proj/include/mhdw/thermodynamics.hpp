#pragma once

// Constitutive laws of the planar heat-conducting non-resistive MHD model:
// pressure, specific internal energy and entropy with a radiation part,
// temperature-dependent viscosity and conductivity, and the derived
// Helmholtz function. Everything here is a pure function of its inputs.

#include <array>
#include <stdexcept>
#include <string>

namespace mhdw {

/// Raised when a thermodynamic or kinematic input leaves its domain
/// (non-positive density or temperature, negative cut-off argument, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace thermo {

struct EosParams {
  double gamma = 5.0 / 3.0;  // adiabatic exponent, > 1
  double a = 1.0;            // radiation constant
  double c_v = 1.0;          // specific heat at constant volume
  double mu0 = 1.0;
  double mu1 = 1.0;
  double kappa0 = 1.0;
  double kappa2 = 1.0;
  double kappa3 = 1.0;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct ThermoPoint {
  double rho;
  double theta;
};

/// A quantity split into its "matter" and "radiation" parts.
struct Split {
  double matter;
  double radiation;
  double total() const { return matter + radiation; }
};

using Tensor2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

// p = rho*theta + rho^gamma + (a/3) theta^4
Split pressure(ThermoPoint pt, const EosParams& p);
// e = rho^(gamma-1)/(gamma-1) + c_v theta + a theta^4 / rho
Split internal_energy(ThermoPoint pt, const EosParams& p);
// s = log(theta^c_v / rho) + (4a/3) theta^3 / rho
Split entropy(ThermoPoint pt, const EosParams& p);

// Closed-form partial derivatives.
double dpressure_drho(ThermoPoint pt, const EosParams& p);
double dpressure_matter_drho(ThermoPoint pt, const EosParams& p);
double denergy_dtheta(ThermoPoint pt, const EosParams& p);
double denergy_drho(ThermoPoint pt, const EosParams& p);
double dentropy_drho(ThermoPoint pt, const EosParams& p);
double dentropy_dtheta(ThermoPoint pt, const EosParams& p);

/// Largest relative defect of theta*Ds = De + p D(1/rho), taken over the rho-
/// and theta-directions, with derivatives from fourth-order central
/// differences of step h. Scale is max(1, |e|). Throws DomainError when
/// the stencil (pt +- 2h) leaves rho, theta > 0.
double gibbs_residual(ThermoPoint pt, const EosParams& p, double h);

struct StabilityPartials {
  double dp_drho;          // closed form
  double de_dtheta;        // closed form
  double dp_drho_fd;       // central difference
  double de_dtheta_fd;     // central difference
  bool stable() const { return dp_drho > 0.0 && de_dtheta > 0.0; }
};
StabilityPartials stability_check(ThermoPoint pt, const EosParams& p, double h);

/// H = rho*e - theta_bar*rho*s.
double helmholtz(ThermoPoint pt, const EosParams& p, double theta_bar);
/// d/drho of helmholtz at fixed theta.
double helmholtz_drho(ThermoPoint pt, const EosParams& p, double theta_bar);

/// Both sides of the Helmholtz coercivity bound
///   H_tb(rho,theta) >= 1/4 (rho e + tb rho |s|)
///                      - |(rho - rho_bar) dH_{2tb}/drho(rho_bar, 2tb) + H_{2tb}(rho_bar, 2tb)|
struct CoercivitySides {
  double lhs;
  double rhs;
  double margin() const { return lhs - rhs; }
};
CoercivitySides helmholtz_coercivity(ThermoPoint pt, const EosParams& p, double theta_bar,
                                     double rho_bar);

struct Transport {
  double mu;           // shear viscosity mu0 + mu1 theta
  double kappa;        // kappa0 + kappa2 theta^2 + kappa3 theta^3
  double kappa_delta;  // kappa + delta (theta^Gamma + 1/theta)
  double K_delta;      // int_1^theta kappa_delta(z) dz
};
Transport transport(double theta, const EosParams& p, double delta, double Gamma);

double viscosity(double theta, const EosParams& p);
double conductivity(double theta, const EosParams& p);
/// kappa_delta and its antiderivative K_delta (K_delta(1) = 0).
double kappa_delta(double theta, const EosParams& p, double delta, double Gamma);
double kappa_delta_prime(double theta, const EosParams& p, double delta, double Gamma);
double K_delta(double theta, const EosParams& p, double delta, double Gamma);

/// S = mu(theta) (grad u + grad u^T - div u I); symmetric and trace-free.
Tensor2 viscous_stress(const Tensor2& grad_u, double theta, const EosParams& p);
/// q = -kappa(theta) grad theta.
Vec2 heat_flux(const Vec2& grad_theta, double theta, const EosParams& p);

}  // namespace thermo
}  // namespace mhdw
