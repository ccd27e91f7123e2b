#pragma once

// Fixed-step integration over a schedule with per-step diagnostics.

#include "mhdw/diagnostics.hpp"
#include "mhdw/solver.hpp"

#include <functional>
#include <vector>

namespace mhdw {

struct RunHooks {
  solver::ForcingFn forcing;
  /// Called for every stored snapshot (t = 0, each stride, and the final state).
  std::function<void(const solver::State&)> on_snapshot;
  /// Called after every step with the new state and its diagnostics.
  std::function<void(const solver::State&, const diag::DiagnosticsReport&)> on_step;
  bool keep_snapshots = true;
  /// Keep every state, not just the strided snapshots (for weak residuals).
  bool keep_all_states = false;
};

struct Trajectory {
  std::vector<solver::State> snapshots;
  std::vector<diag::DiagnosticsReport> diagnostics;  // t = 0 and one per step
  std::vector<solver::StepReport> steps;
  solver::State final_state;
};

/// Integrates from make_state(initial) to schedule.t_final. Step failures
/// propagate; the CFL limit is checked before every step.
Trajectory run(const solver::InitialData& initial, const solver::RegParams& reg, const thermo::EosParams& p,
               const solver::Schedule& schedule, const RunHooks& hooks = {});

/// Same, starting from an existing state.
Trajectory run(solver::State state, const solver::RegParams& reg, const thermo::EosParams& p,
               const solver::Schedule& schedule, const RunHooks& hooks = {});

}  // namespace mhdw
