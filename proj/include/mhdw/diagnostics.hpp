#pragma once

// Balance residuals, dissipation, weak-formulation residuals, cut-off
// renormalization checks and empirical functional-inequality constants.

#include "mhdw/manufactured.hpp"
#include "mhdw/solver.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mhdw::diag {

using solver::RegParams;
using solver::State;
using thermo::EosParams;

struct DiagnosticsReport {
  double t = 0.0;
  double mass_rho = 0.0;
  double mass_b = 0.0;
  double kinetic_energy = 0.0;
  double magnetic_energy = 0.0;
  double internal_energy_total = 0.0;
  double artificial_energy = 0.0;
  double total_energy = 0.0;
  double entropy_total = 0.0;
  double sigma_integral = 0.0;
  double domination_min = 0.0;
  double domination_max = 0.0;
  double energy_balance_residual = 0.0;
  double entropy_balance_residual = 0.0;
  double helmholtz_functional = 0.0;
  long floor_violations = 0;

  static const std::array<const char*, 16>& field_names();
  /// Values in field_names() order.
  std::array<double, 16> values() const;
};

/// Every field of the report; a pure function of its arguments.
DiagnosticsReport report(const State& s, const RegParams& reg, const EosParams& p);

/// Nodal dissipation density sigma_{eps,delta}.
disc::ScalarField sigma_density(const State& s, const RegParams& reg, const EosParams& p);

/// Mean over the interior of the window of |dS/dt (centred) - entropy source|.
double entropy_balance_residual(std::span<const State> window, const RegParams& reg, const EosParams& p);

// ---------------------------------------------------------------------------
// Weak formulation

struct TestFunction {
  enum class Kind { Scalar, Vector };
  std::string name;
  Kind kind = Kind::Scalar;
  std::function<mms::Jet(double x, double y)> phi;   // scalar, or first component
  std::function<mms::Jet(double x, double y)> phi2;  // second component (vector tests)
  std::function<double(double t)> psi;
  std::function<double(double t)> dpsi;
  double t_end = 1.0;  // psi vanishes here
  bool requires_compact_spatial_support = false;
  bool nonneg = false;
};

/// psi(t) = (1 - t/T)^3 on [0, T].
std::pair<std::function<double(double)>, std::function<double(double)>> temporal_factor(double T);

/// The twelve canonical test functions on [0,lx]x[0,ly] with temporal support [0,T].
std::vector<TestFunction> test_library(double lx, double ly, double T);

/// Throws std::invalid_argument when a test violates its own flags.
void validate_test_function(const TestFunction& f, const disc::Grid& g);

enum class Equation { Continuity, Momentum, Entropy, Magnetic, Energy };
const char* equation_name(Equation e);

struct WeakResidual {
  Equation equation;
  std::string test;
  double residual;  // signed; for Entropy this is the slack, which must be <= tolerance
};

/// Residuals of the regularized weak forms over a stored trajectory (every
/// step, uniform or not). Scalar tests apply to continuity, magnetic and (if
/// nonneg) entropy; vector tests to momentum. One Energy row is appended.
std::vector<WeakResidual> weak_residuals(std::span<const State> trajectory, const std::vector<TestFunction>& tests,
                                         const RegParams& reg, const EosParams& p);

// ---------------------------------------------------------------------------
// Cut-offs and renormalization

/// T_k(z) = k T(z/k); T(z) = z on [0,1], 1 + 2s - s^2 with s = (z-1)/2 on [1,3], 2 beyond.
double cutoff_T(double z, double k);
double cutoff_T_prime(double z, double k);
/// L_k(rho) = int_1^rho T_k(z)/z^2 dz (closed form); -inf at rho = 0.
double cutoff_L(double rho, double k);

enum class Which { Rho, B };

/// Mean over the window interior of the L1 norm of
///   dT_k(f)/dt + div(T_k(f) u) + (T_k'(f) f - T_k(f)) div u - eps T_k'(f) Lap f.
double renormalized_residual(std::span<const State> window, double k, Which which, const RegParams& reg);
/// Same with the identity in place of T_k.
double continuity_residual(std::span<const State> window, Which which, const RegParams& reg);

// ---------------------------------------------------------------------------
// Functional inequalities

struct InequalityConstants {
  double korn_ratio_max = 0.0;
  double poincare_ratio_max = 0.0;
  double coercivity_min_margin = 0.0;
  int korn_samples = 0;
  int poincare_samples = 0;
};

/// Empirical suprema over seeded random admissible fields on the grid.
InequalityConstants inequality_constants(const disc::Grid& g, int samples, std::uint64_t seed,
                                         const EosParams& p = {}, double theta_bar = 1.0, double rho_bar = 1.0);

/// ||grad U|| / ||grad U + grad^t U - div U I|| for a Galerkin field.
double korn_ratio(std::span<const double> coeffs, const disc::GalerkinBasis& basis);
/// ||u||_{W^{1,2}} / (||grad u||_{L2} + ||u||_{L2(left half)}).
double poincare_ratio(const disc::ScalarField& u);

}  // namespace mhdw::diag
