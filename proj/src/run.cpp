#include "mhdw/run.hpp"

#include <stdexcept>

namespace mhdw {

Trajectory run(const solver::InitialData& initial, const solver::RegParams& reg, const thermo::EosParams& p,
               const solver::Schedule& schedule, const RunHooks& hooks) {
  reg.validate(p);
  p.validate();
  return run(solver::make_state(initial, reg, p), reg, p, schedule, hooks);
}

Trajectory run(solver::State state, const solver::RegParams& reg, const thermo::EosParams& p,
               const solver::Schedule& schedule, const RunHooks& hooks) {
  const long n = schedule.steps();
  if (schedule.snapshot_stride < 1) throw std::invalid_argument("schedule: snapshot_stride >= 1");
  const solver::ForcingFn* forcing = hooks.forcing ? &hooks.forcing : nullptr;
  const double t0 = state.t;

  Trajectory out;
  auto store = [&](const solver::State& s) {
    if (hooks.on_snapshot) hooks.on_snapshot(s);
    if (hooks.keep_snapshots || hooks.keep_all_states) out.snapshots.push_back(s);
  };
  out.diagnostics.push_back(diag::report(state, reg, p));
  store(state);
  for (long k = 1; k <= n; ++k) {
    // Hit t0 + k dt exactly rather than accumulating roundoff.
    const double dt = t0 + k * schedule.dt - state.t;
    auto res = solver::step(state, reg, p, dt, forcing);
    state = std::move(res.state);
    out.steps.push_back(res.report);
    out.diagnostics.push_back(diag::report(state, reg, p));
    if (hooks.on_step) hooks.on_step(state, out.diagnostics.back());
    if (hooks.keep_all_states || k % schedule.snapshot_stride == 0 || k == n) store(state);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace mhdw
