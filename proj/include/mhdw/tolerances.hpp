#pragma once

// Every acceptance tolerance in one place. The CLI prints this table
// (`mhdw tolerances`) and the acceptance suite reads the same constants.

#include <array>
#include <string_view>

namespace mhdw::tol {

inline constexpr double gibbs_relative = 1e-6;
inline constexpr double gibbs_step = 1e-4;
inline constexpr double mass_relative = 1e-12;
inline constexpr double domination_b_minus_2rho = 1e-8;
inline constexpr double domination_bounds = 1e-8;
inline constexpr double ratio_low = 1.7;
inline constexpr double ratio_high = 2.3;
inline constexpr double sigma_floor = -1e-12;
inline constexpr double equilibrium_theta = 1e-4;
inline constexpr double equilibrium_exact = 1e-10;
inline constexpr double heat_decay = 1e-6;
inline constexpr double mms_spatial_order = 1.9;
inline constexpr double mms_temporal_order = 0.9;
inline constexpr double weak_mass = 1e-9;
inline constexpr double entropy_slack = 1e-6;
inline constexpr double inequality_grid_factor = 2.0;
inline constexpr int inequality_samples = 100;
inline constexpr double equilibrium_run_residual = 1e-10;
inline constexpr double report_equilibrium = 1e-12;
inline constexpr double renormalized_identity = 1e-12;

struct Entry {
  std::string_view name;
  double value;
  std::string_view meaning;
};

inline constexpr std::array<Entry, 20> table{{
    {"gibbs_relative", gibbs_relative, "max relative Gibbs defect on the (rho, theta) sample grid"},
    {"gibbs_step", gibbs_step, "finite-difference step of the Gibbs check"},
    {"mass_relative", mass_relative, "relative drift of int rho and int b over 100 steps"},
    {"domination_b_minus_2rho", domination_b_minus_2rho, "max |b - 2 rho| after 100 steps with b0 = 2 rho0"},
    {"domination_bounds", domination_bounds, "slack on [C_star, C^star] for b/rho"},
    {"ratio_low", ratio_low, "lower bound of the first-order refinement ratio window"},
    {"ratio_high", ratio_high, "upper bound of the first-order refinement ratio window"},
    {"sigma_floor", sigma_floor, "lowest admissible nodal dissipation"},
    {"equilibrium_theta", equilibrium_theta, "uniform temperature vs ODE oracle"},
    {"equilibrium_exact", equilibrium_exact, "uniform temperature drift when delta = epsilon"},
    {"heat_decay", heat_decay, "cosine-mode amplitude vs analytic heat decay"},
    {"mms_spatial_order", mms_spatial_order, "minimum observed spatial order"},
    {"mms_temporal_order", mms_temporal_order, "minimum observed temporal order"},
    {"weak_mass", weak_mass, "weak continuity/magnetic residual for space-constant tests"},
    {"entropy_slack", entropy_slack, "largest admissible signed entropy-inequality slack"},
    {"inequality_grid_factor", inequality_grid_factor, "allowed ratio change of Korn/Poincare estimates 64^2 vs 128^2"},
    {"inequality_samples", double(inequality_samples), "random fields per inequality estimate"},
    {"equilibrium_run_residual", equilibrium_run_residual, "diagnostic residuals on an equilibrium run"},
    {"report_equilibrium", report_equilibrium, "report balances on a uniform equilibrium state"},
    {"renormalized_identity", renormalized_identity, "renormalized vs plain residual when k >= max rho"},
}};

}  // namespace mhdw::tol
