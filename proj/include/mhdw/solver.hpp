#pragma once

// IMEX time stepping of the regularized system: epsilon-parabolic density and
// magnetic equations, Galerkin momentum equation with artificial pressure,
// and the internal-energy equation with augmented conductivity.

#include "mhdw/discretization.hpp"
#include "mhdw/thermodynamics.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhdw::solver {

using disc::GalerkinBasis;
using disc::Grid;
using disc::ScalarField;
using disc::VectorField;
using thermo::EosParams;

constexpr double kThetaFloor = 1e-10;

struct RegParams {
  double epsilon = 1e-2;
  double delta = 1e-2;
  double Gamma = 8.0;
  int n = 16;
  double theta_bar = 1.0;
  int picard_sweeps = 1;

  /// Every violated constraint, one message each; empty when admissible.
  std::vector<std::string> violations(const EosParams& p) const;
  /// Throws std::invalid_argument listing all violations.
  void validate(const EosParams& p) const;
};

/// Raised when explicit advection would violate dt <= 0.5 h / max|u|.
class CflError : public std::runtime_error {
 public:
  CflError(const std::string& what, double suggested) : std::runtime_error(what), suggested_dt(suggested) {}
  double suggested_dt;
};

/// Sub-step failure (Newton divergence, singular momentum matrix, loss of
/// positivity in rho or b).
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FloorCounters {
  long theta = 0;  // nodes clamped to the temperature floor
  long rho = 0;    // nodes with rho <= 0 after a step
  long b = 0;
  long total() const { return theta + rho + b; }
};

/// Running integrals needed to turn the energy and entropy balances into
/// residuals without re-reading the trajectory.
struct Ledger {
  double energy0 = 0.0;
  double energy_source = 0.0;     // int_0^t int (delta/theta^2 - eps theta^5)
  double entropy0 = 0.0;
  double entropy_source = 0.0;    // int_0^t int (production + eps coupling - eps theta^4)
  double entropy_rate = 0.0;      // rate at the current time (for trapezoid sums)
};

struct State {
  double t = 0.0;
  ScalarField rho;
  ScalarField b;
  ScalarField theta;
  GalerkinBasis basis;
  std::vector<double> a;  // velocity coefficients, component-major
  VectorField u;          // nodal velocity, kept consistent with a
  FloorCounters floors;
  Ledger ledger;
  long steps = 0;

  const Grid& grid() const { return rho.grid; }
  void set_velocity(std::vector<double> coeffs);
};

struct InitialData {
  ScalarField rho0;
  ScalarField b0;
  ScalarField theta0;
  VectorField u0;
  double c_star = 0.0;        // min b0/rho0
  double c_star_upper = 0.0;  // max b0/rho0
};

/// Validates positivity and fills the domination constants.
InitialData make_initial_data(ScalarField rho0, ScalarField b0, ScalarField theta0, VectorField u0);

/// Spectral mollification of the scalar data (positive kernel, so bounds and
/// domination are preserved) with recomputed C_star, C^star.
InitialData regularize_initial_data(const InitialData& raw, const RegParams& reg);

/// State at t = 0 with u projected onto the Galerkin space and the ledger
/// initialised.
State make_state(const InitialData& init, const RegParams& reg, const EosParams& p);

/// Spatial derivatives of a state that the scheme and the diagnostics share.
struct FieldDerivatives {
  VectorField grad_rho;
  VectorField grad_b;
  VectorField grad_theta;
  ScalarField lap_rho;
  disc::VelocityGradient du;  // du[c][a] = d u_c / d x_a
  ScalarField div_u;
};
FieldDerivatives derivatives(const State& s);

/// Conserved and balanced totals of a state.
struct Totals {
  double mass_rho = 0.0;
  double mass_b = 0.0;
  double kinetic = 0.0;
  double magnetic = 0.0;
  double internal = 0.0;    // int rho e
  double artificial = 0.0;  // delta int (rho^G/(G-1) + rho^2 + b^G/(G-1) + b^2)
  double entropy = 0.0;     // int rho s
  double energy() const { return kinetic + magnetic + internal + artificial; }
};
Totals totals(const State& s, const RegParams& reg, const EosParams& p);

/// int (delta / theta^2 - eps theta^5).
double energy_source_rate(const ScalarField& theta, const RegParams& reg);

/// Right-hand side of the integrated entropy equation:
/// int [sigma-type production + eps (Lap rho / theta)(theta s - e - p/rho) - eps theta^4].
/// The production here omits the eps p_M' |grad rho|^2/(rho theta) term that
/// only appears once the coupling term is rewritten.
double entropy_source_rate(const State& s, const FieldDerivatives& d, const RegParams& reg,
                           const EosParams& p);
/// Nodal integrand of entropy_source_rate.
ScalarField entropy_source_density(const State& s, const FieldDerivatives& d, const RegParams& reg,
                                   const EosParams& p);

/// External forcing added to each equation (manufactured solutions).
struct Forcing {
  ScalarField rho;
  ScalarField b;
  ScalarField theta;  // added to the internal-energy equation
  VectorField u;      // body force, tested against the Galerkin modes
};
using ForcingFn = std::function<Forcing(double t)>;

/// Largest admissible explicit step for a nodal velocity field.
double cfl_limit(const VectorField& u);
void check_cfl(const VectorField& u, double dt);

/// f_t + div(f u) = eps Lap f + source, Neumann; explicit advection, implicit diffusion.
ScalarField advance_scalar(const ScalarField& f, const VectorField& u, double epsilon, double dt,
                           const ScalarField* source = nullptr);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;   // final max-norm residual, relative
  long floor_hits = 0;
};

/// Implicit temperature update. Advection, viscous heating and pressure work
/// use level n from `prev`; the eps-heating terms use rho^{n+1}, b^{n+1}.
ScalarField advance_temperature(const State& prev, const ScalarField& rho_next, const ScalarField& b_next,
                                const RegParams& reg, const EosParams& p, double dt,
                                NewtonReport* report = nullptr, const ScalarField* source = nullptr);

/// Temperature update for a given state (rho, b frozen at their current values).
ScalarField advance_temperature(const State& s, const RegParams& reg, const EosParams& p, double dt,
                                NewtonReport* report = nullptr);

/// Semi-implicit Galerkin momentum update; returns the new coefficient vector.
std::vector<double> advance_momentum(const State& prev, const ScalarField& rho_next, const ScalarField& b_next,
                                     const ScalarField& theta_next, const RegParams& reg, const EosParams& p,
                                     double dt, const VectorField* force = nullptr);

/// Momentum update with the state's own scalars held frozen.
std::vector<double> advance_momentum(const State& s, const RegParams& reg, const EosParams& p, double dt);

/// Frozen-coefficient viscous Galerkin matrix <S(theta, grad phi_j), grad phi_m>
/// over the 2n coefficient space, row-major.
std::vector<double> viscous_matrix(const ScalarField& theta, const GalerkinBasis& basis, const EosParams& p);

struct StepReport {
  int newton_iterations = 0;
  double newton_residual = 0.0;
  long new_floor_violations = 0;
  double cfl = 0.0;  // dt * max|u| / h
};

struct StepResult {
  State state;
  StepReport report;
};

StepResult step(const State& s, const RegParams& reg, const EosParams& p, double dt,
                const ForcingFn* forcing = nullptr);

struct Schedule {
  double t_final = 1.0;
  double dt = 1e-3;
  int snapshot_stride = 10;
  /// Number of steps, rounding t_final/dt to the nearest integer.
  long steps() const;
};

}  // namespace mhdw::solver
