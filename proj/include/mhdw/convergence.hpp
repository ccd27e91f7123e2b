#pragma once

// Parameter ladders for the Galerkin, vanishing-viscosity and
// vanishing-pressure limits, measured as Cauchy distances to the finest rung.

#include "mhdw/run.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mhdw::conv {

using solver::State;

/// zeta = b/rho, with zeta_vacuum where rho <= 0.
disc::ScalarField zeta_field(const State& s, double zeta_vacuum);

/// int rho |zeta - zeta_ref|^pexp.
double zeta_metric(const State& s, const disc::ScalarField& zeta_ref, double pexp, double zeta_vacuum = 0.0);

struct ArtificialNorms {
  double rho_gamma = 0.0;    // || delta rho^Gamma ||_1
  double rho_sq = 0.0;       // || delta rho^2 ||_1
  double b_gamma = 0.0;
  double b_sq = 0.0;
  double theta_inv_sq = 0.0; // || delta theta^-2 ||_1
};
ArtificialNorms artificial_norms(const State& s, const solver::RegParams& reg);

enum class Param { N, Epsilon, Delta };
const char* param_name(Param p);
/// "n", "epsilon" or "delta"; throws std::invalid_argument otherwise.
Param parse_param(const std::string& s);

struct SweepPlan {
  Param which = Param::Epsilon;
  std::vector<double> ladder;  // finest rung last
  double t_cmp = 0.5;

  /// Every violated precondition; the ladder needs >= 3 strictly monotone
  /// admissible entries (decreasing for epsilon/delta, increasing for n).
  std::vector<std::string> violations(const solver::RegParams& base, const thermo::EosParams& p,
                                      const disc::Grid& g) const;
  void validate(const solver::RegParams& base, const thermo::EosParams& p, const disc::Grid& g) const;
  /// Base parameters with the swept entry set to rung i.
  solver::RegParams rung(const solver::RegParams& base, std::size_t i) const;
};

struct RungResult {
  double value = 0.0;
  double rho_l1 = 0.0, rho_l2 = 0.0;
  double b_l1 = 0.0, b_l2 = 0.0;
  double theta_l1 = 0.0, theta_l2 = 0.0;
  double u_l2 = 0.0;
  double zeta_metric = 0.0;  // against the finest rung's zeta, p = 1
  ArtificialNorms artificial;
};

struct ConvergenceReport {
  Param which = Param::Epsilon;
  double t_cmp = 0.0;
  std::vector<RungResult> rungs;
  bool fields_monotone = false;  // every field distance decreases along the ladder
  bool u_monotone = false;       // the velocity distance decreases
  bool zeta_monotone = false;
  bool artificial_monotone = false;  // every artificial norm decreases
  std::string error;                 // first rung failure, if any
};

/// Thrown when a rung fails; carries the rungs that completed.
class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, ConvergenceReport partial)
      : std::runtime_error(what), report(std::move(partial)) {}
  ConvergenceReport report;
};

/// One run per rung to t_cmp (concurrently), distances against the last rung.
ConvergenceReport sweep(const SweepPlan& plan, const solver::InitialData& initial, const solver::RegParams& base,
                        const thermo::EosParams& p, double dt);

/// Builds the report from final rung states (finest last).
ConvergenceReport compare(const SweepPlan& plan, const std::vector<State>& finals, const solver::RegParams& base,
                          double zeta_vacuum);

}  // namespace mhdw::conv
