// Command-line front end: run, sweep, check, mms, tolerances.

#include "mhdw/cli_io.hpp"
#include "mhdw/convergence.hpp"
#include "mhdw/diagnostics.hpp"
#include "mhdw/manufactured.hpp"
#include "mhdw/run.hpp"
#include "mhdw/tolerances.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mhdw;

namespace {

std::string output_dir(const io::Config& c, const std::string& override_dir) {
  const std::string d = override_dir.empty() ? c.output.directory : override_dir;
  fs::create_directories(d);
  return d;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  const auto cfg = io::load_config(config_path);
  const auto init = io::initial_data(cfg);
  const std::string dir = output_dir(cfg, out_override);

  std::ofstream csv;
  if (cfg.output.csv) {
    csv.open(fs::path(dir) / "diagnostics.csv");
    io::write_diagnostics_header(csv);
  }
  RunHooks hooks;
  hooks.keep_snapshots = false;
  long snap = 0;
  if (cfg.output.snapshots)
    hooks.on_snapshot = [&](const solver::State& s) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%06ld.bin", snap++);
      io::write_snapshot(s, (fs::path(dir) / name).string());
    };

  // Invariants checked on every row.
  long bad_sigma = 0, bad_dom = 0, bad_finite = 0;
  auto check_row = [&](const diag::DiagnosticsReport& r) {
    for (double v : r.values()) bad_finite += !std::isfinite(v);
    bad_sigma += r.sigma_integral < tol::sigma_floor;
    bad_dom += r.domination_min < init.c_star - tol::domination_bounds ||
               r.domination_max > init.c_star_upper + tol::domination_bounds;
    if (csv.is_open()) io::write_diagnostics_row(csv, r);
  };
  hooks.on_step = [&](const solver::State&, const diag::DiagnosticsReport& r) { check_row(r); };
  auto s0 = solver::make_state(init, cfg.reg, cfg.eos);
  check_row(diag::report(s0, cfg.reg, cfg.eos));
  auto traj = run(std::move(s0), cfg.reg, cfg.eos, cfg.time, hooks);

  const auto& last = traj.diagnostics.back();
  std::printf("t = %.6g after %zu steps\n", last.t, traj.steps.size());
  std::printf("mass_rho %.16g  mass_b %.16g\n", last.mass_rho, last.mass_b);
  std::printf("energy_balance_residual %.3e  entropy_balance_residual %.3e\n", last.energy_balance_residual,
              last.entropy_balance_residual);
  std::printf("domination [%.12g, %.12g] (initial [%.12g, %.12g])\n", last.domination_min, last.domination_max,
              init.c_star, init.c_star_upper);
  std::printf("floor violations %ld\n", last.floor_violations);
  std::printf("output written to %s\n", dir.c_str());
  const bool ok = bad_sigma == 0 && bad_dom == 0 && bad_finite == 0;
  if (!ok)
    std::fprintf(stderr, "assertion failures: %ld negative sigma, %ld domination, %ld non-finite\n", bad_sigma,
                 bad_dom, bad_finite);
  return ok ? 0 : 1;
}

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad ladder entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, const std::string& which,
              const std::string& ladder, double t_cmp) {
  const auto cfg = io::load_config(config_path);
  conv::SweepPlan plan{conv::parse_param(which), parse_ladder(ladder), t_cmp};
  plan.validate(cfg.reg, cfg.eos, cfg.grid);
  const auto init = io::initial_data(cfg);
  const auto rep = conv::sweep(plan, init, cfg.reg, cfg.eos, cfg.time.dt);
  const std::string dir = output_dir(cfg, out_override);
  const auto path = (fs::path(dir) / ("sweep_" + which + ".csv")).string();
  io::write_sweep_csv(path, rep);
  io::write_sweep_csv(std::cout, rep);
  std::printf("monotone: fields %d  u %d  zeta %d  artificial %d\n", rep.fields_monotone, rep.u_monotone,
              rep.zeta_monotone, rep.artificial_monotone);
  std::printf("report written to %s\n", path.c_str());
  return 0;
}

int cmd_check(std::uint64_t seed) {
  const thermo::EosParams p;
  double gibbs = 0.0, margin = INFINITY;
  bool stable = true;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const thermo::ThermoPoint pt{0.1 * i, 0.1 * j};
      gibbs = std::max(gibbs, thermo::gibbs_residual(pt, p, tol::gibbs_step));
      stable = stable && thermo::stability_check(pt, p, tol::gibbs_step).stable();
      margin = std::min(margin, thermo::helmholtz_coercivity(pt, p, 1.0, 1.0).margin());
    }
  const auto ineq = diag::inequality_constants({64, 64, 1.0, 1.0}, tol::inequality_samples, seed, p);
  std::printf("gibbs_residual_max %.3e (tolerance %.0e)\n", gibbs, tol::gibbs_relative);
  std::printf("stability %s\n", stable ? "ok" : "FAILED");
  std::printf("coercivity_min_margin %.6g\n", margin);
  std::printf("korn_ratio_max %.6f over %d samples\n", ineq.korn_ratio_max, ineq.korn_samples);
  std::printf("poincare_ratio_max %.6f over %d samples\n", ineq.poincare_ratio_max, ineq.poincare_samples);
  const bool ok = gibbs <= tol::gibbs_relative && stable && margin >= 0.0 && std::isfinite(ineq.korn_ratio_max) &&
                  std::isfinite(ineq.poincare_ratio_max) && ineq.korn_samples >= tol::inequality_samples &&
                  ineq.poincare_samples >= tol::inequality_samples;
  return ok ? 0 : 1;
}

int cmd_mms(const std::string& config_path) {
  const auto cfg = io::load_config(config_path);
  const int n = cfg.grid.nx;
  const double dt = cfg.time.dt, T = cfg.time.t_final;
  // Spatial runs use the finest temporal step: the explicit pressure coupling
  // is unstable on the steady case well before the advective CFL limit.
  const auto sp = mms::spatial_order(mms::steady_case(), {n, 2 * n, 4 * n}, dt / 4, T);
  std::printf("spatial (dt = %g, T = %g)\n", dt / 4, T);
  for (std::size_t i = 0; i < sp.error.size(); ++i) std::printf("  h = %-10g error %.4e\n", sp.parameter[i], sp.error[i]);
  for (double o : sp.order) std::printf("  order %.3f\n", o);
  const auto tm = mms::temporal_order(mms::unsteady_case(), 2 * n, {dt, dt / 2, dt / 4}, T);
  std::printf("temporal (grid %d^2, T = %g)\n", 2 * n, T);
  for (std::size_t i = 0; i < tm.error.size(); ++i) std::printf("  dt = %-9g error %.4e\n", tm.parameter[i], tm.error[i]);
  for (double o : tm.order) std::printf("  order %.3f\n", o);
  const bool ok = sp.min_order() >= tol::mms_spatial_order && tm.min_order() >= tol::mms_temporal_order;
  std::printf("%s\n", ok ? "orders ok" : "orders below threshold");
  return ok ? 0 : 1;
}

int cmd_tolerances() {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : tol::table) j[std::string(e.name)] = {{"value", e.value}, {"meaning", std::string(e.meaning)}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mhdw: planar compressible MHD simulator and verification lab"};
  app.require_subcommand(1);
  std::string config, out_dir, which = "epsilon", ladder;
  std::uint64_t seed = 42;
  double t_cmp = 0.5;

  auto* run = app.add_subcommand("run", "integrate a configuration, write snapshots and diagnostics CSV");
  run->add_option("config,--config", config, "config file")->required();
  run->add_option("--output-dir", out_dir, "overrides output.directory");

  auto* sweep = app.add_subcommand("sweep", "parameter ladder for the n, epsilon or delta limit");
  sweep->add_option("config,--config", config, "config file")->required();
  sweep->add_option("--output-dir", out_dir, "overrides output.directory");
  sweep->add_option("--which", which, "n | epsilon | delta")->check(CLI::IsMember({"n", "epsilon", "delta"}));
  sweep->add_option("--ladder", ladder, "comma-separated values, finest last")->required();
  sweep->add_option("--t-cmp", t_cmp, "comparison time");

  auto* check = app.add_subcommand("check", "constitutive and inequality property suite (no simulation)");
  check->add_option("--seed", seed, "seed for the random inequality samples");

  auto* mms_cmd = app.add_subcommand("mms", "manufactured-solution order study");
  mms_cmd->add_option("config,--config", config, "config file (grid, dt, t_final)")->required();

  auto* tols = app.add_subcommand("tolerances", "print the tolerance table as JSON");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out_dir);
    if (*sweep) return cmd_sweep(config, out_dir, which, ladder, t_cmp);
    if (*check) return cmd_check(seed);
    if (*mms_cmd) return cmd_mms(config);
    if (*tols) return cmd_tolerances();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
