#include "mhdw/convergence.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>

namespace mhdw::conv {

using disc::ScalarField;

disc::ScalarField zeta_field(const State& s, double zeta_vacuum) {
  ScalarField z(s.grid());
  for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] = s.rho.v[i] > 0.0 ? s.b.v[i] / s.rho.v[i] : zeta_vacuum;
  return z;
}

double zeta_metric(const State& s, const ScalarField& zeta_ref, double pexp, double zeta_vacuum) {
  disc::require_same_grid(s.grid(), zeta_ref.grid, "zeta_metric");
  if (!(pexp >= 1.0) || !std::isfinite(pexp)) throw std::invalid_argument("zeta_metric: exponent in [1, inf)");
  const auto z = zeta_field(s, zeta_vacuum);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.v.size(); ++i)
    sum += std::max(s.rho.v[i], 0.0) * std::pow(std::abs(z.v[i] - zeta_ref.v[i]), pexp);
  return sum * s.grid().cell_area();
}

ArtificialNorms artificial_norms(const State& s, const solver::RegParams& reg) {
  ArtificialNorms n;
  for (std::size_t i = 0; i < s.rho.v.size(); ++i) {
    const double r = std::abs(s.rho.v[i]), b = std::abs(s.b.v[i]), th = s.theta.v[i];
    n.rho_gamma += std::pow(r, reg.Gamma);
    n.rho_sq += r * r;
    n.b_gamma += std::pow(b, reg.Gamma);
    n.b_sq += b * b;
    n.theta_inv_sq += 1.0 / (th * th);
  }
  const double w = reg.delta * s.grid().cell_area();
  n.rho_gamma *= w;
  n.rho_sq *= w;
  n.b_gamma *= w;
  n.b_sq *= w;
  n.theta_inv_sq *= w;
  return n;
}

const char* param_name(Param p) {
  switch (p) {
    case Param::N: return "n";
    case Param::Epsilon: return "epsilon";
    case Param::Delta: return "delta";
  }
  return "?";
}

Param parse_param(const std::string& s) {
  if (s == "n") return Param::N;
  if (s == "epsilon") return Param::Epsilon;
  if (s == "delta") return Param::Delta;
  throw std::invalid_argument("sweep parameter must be n, epsilon or delta (got '" + s + "')");
}

std::vector<std::string> SweepPlan::violations(const solver::RegParams& base, const thermo::EosParams& p,
                                               const disc::Grid& g) const {
  std::vector<std::string> out;
  if (ladder.size() < 3) out.push_back("sweep: ladder needs at least 3 entries");
  const bool increasing = which == Param::N;
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const bool ok = increasing ? ladder[i] > ladder[i - 1] : ladder[i] < ladder[i - 1];
    if (!ok) {
      out.push_back(std::string("sweep: ladder must be strictly ") + (increasing ? "increasing" : "decreasing"));
      break;
    }
  }
  const int box = (g.nx / 2 - 1) * (g.ny / 2 - 1);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (which == Param::N && (ladder[i] != std::floor(ladder[i]) || ladder[i] > box)) {
      std::ostringstream os;
      os << "sweep: n = " << ladder[i] << " must be an integer no larger than " << box;
      out.push_back(os.str());
    }
    for (auto& v : rung(base, i).violations(p)) out.push_back(v + " (rung " + std::to_string(i) + ")");
  }
  if (!(t_cmp > 0.0)) out.push_back("sweep: t_cmp > 0");
  return out;
}

void SweepPlan::validate(const solver::RegParams& base, const thermo::EosParams& p, const disc::Grid& g) const {
  auto v = violations(base, p, g);
  if (v.empty()) return;
  std::string msg;
  for (auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw std::invalid_argument(msg);
}

solver::RegParams SweepPlan::rung(const solver::RegParams& base, std::size_t i) const {
  solver::RegParams r = base;
  const double v = ladder.at(i);
  switch (which) {
    case Param::N: r.n = static_cast<int>(v); break;
    case Param::Epsilon: r.epsilon = v; break;
    case Param::Delta: r.delta = v; break;
  }
  return r;
}

namespace {

struct Dist {
  double l1 = 0.0, l2 = 0.0;
};

Dist distance(const std::vector<double>& a, const std::vector<double>& b, double dA) {
  Dist d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    d.l1 += std::abs(e);
    d.l2 += e * e;
  }
  d.l1 *= dA;
  d.l2 = std::sqrt(d.l2 * dA);
  return d;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

ConvergenceReport compare(const SweepPlan& plan, const std::vector<State>& finals, const solver::RegParams& base,
                          double zeta_vacuum) {
  if (finals.size() != plan.ladder.size()) throw std::invalid_argument("compare: one final state per rung");
  ConvergenceReport rep;
  rep.which = plan.which;
  rep.t_cmp = plan.t_cmp;
  const State& ref = finals.back();
  const auto zref = zeta_field(ref, zeta_vacuum);
  const double dA = ref.grid().cell_area();
  for (std::size_t i = 0; i < finals.size(); ++i) {
    const State& s = finals[i];
    disc::require_same_grid(s.grid(), ref.grid(), "compare");
    RungResult r;
    r.value = plan.ladder[i];
    auto d = distance(s.rho.v, ref.rho.v, dA);
    r.rho_l1 = d.l1, r.rho_l2 = d.l2;
    d = distance(s.b.v, ref.b.v, dA);
    r.b_l1 = d.l1, r.b_l2 = d.l2;
    d = distance(s.theta.v, ref.theta.v, dA);
    r.theta_l1 = d.l1, r.theta_l2 = d.l2;
    const double ux = distance(s.u.x, ref.u.x, dA).l2, uy = distance(s.u.y, ref.u.y, dA).l2;
    r.u_l2 = std::hypot(ux, uy);
    r.zeta_metric = zeta_metric(s, zref, 1.0, zeta_vacuum);
    r.artificial = artificial_norms(s, plan.rung(base, i));
    rep.rungs.push_back(r);
  }

  // Distances of all but the reference rung, which is zero by construction.
  auto series = [&](auto get, bool include_ref) {
    std::vector<double> v;
    const std::size_t n = rep.rungs.size() - (include_ref ? 0 : 1);
    for (std::size_t i = 0; i < n; ++i) v.push_back(get(rep.rungs[i]));
    return v;
  };
  rep.fields_monotone = true;
  for (auto get : {+[](const RungResult& r) { return r.rho_l1; }, +[](const RungResult& r) { return r.rho_l2; },
                   +[](const RungResult& r) { return r.b_l1; }, +[](const RungResult& r) { return r.b_l2; },
                   +[](const RungResult& r) { return r.theta_l1; }, +[](const RungResult& r) { return r.theta_l2; },
                   +[](const RungResult& r) { return r.u_l2; }})
    rep.fields_monotone = rep.fields_monotone && strictly_decreasing(series(get, false));
  rep.u_monotone = strictly_decreasing(series([](const RungResult& r) { return r.u_l2; }, false));
  rep.zeta_monotone = strictly_decreasing(series([](const RungResult& r) { return r.zeta_metric; }, false));
  rep.artificial_monotone = true;
  for (auto get : {+[](const RungResult& r) { return r.artificial.rho_gamma; },
                   +[](const RungResult& r) { return r.artificial.rho_sq; },
                   +[](const RungResult& r) { return r.artificial.b_gamma; },
                   +[](const RungResult& r) { return r.artificial.b_sq; },
                   +[](const RungResult& r) { return r.artificial.theta_inv_sq; }})
    rep.artificial_monotone = rep.artificial_monotone && strictly_decreasing(series(get, true));
  return rep;
}

ConvergenceReport sweep(const SweepPlan& plan, const solver::InitialData& initial, const solver::RegParams& base,
                        const thermo::EosParams& p, double dt) {
  plan.validate(base, p, initial.rho0.grid);
  solver::Schedule sched{plan.t_cmp, dt, std::numeric_limits<int>::max()};
  RunHooks hooks;
  hooks.keep_snapshots = false;

  std::vector<std::future<State>> jobs;
  for (std::size_t i = 0; i < plan.ladder.size(); ++i) {
    const auto reg = plan.rung(base, i);
    jobs.push_back(std::async(std::launch::async, [=, &initial, &p] {
      return run(initial, reg, p, sched, hooks).final_state;
    }));
  }
  std::vector<std::optional<State>> done(jobs.size());
  std::string error;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      done[i] = jobs[i].get();
    } catch (const std::exception& e) {
      if (error.empty()) {
        std::ostringstream os;
        os << "rung " << i << " (" << param_name(plan.which) << " = " << plan.ladder[i] << ") failed: " << e.what();
        error = os.str();
      }
    }
  }
  if (!error.empty()) {
    // Partial report: the completed rungs, without distances.
    ConvergenceReport partial;
    partial.which = plan.which;
    partial.t_cmp = plan.t_cmp;
    partial.error = error;
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (!done[i]) continue;
      RungResult r;
      r.value = plan.ladder[i];
      r.artificial = artificial_norms(*done[i], plan.rung(base, i));
      partial.rungs.push_back(r);
    }
    throw SweepError(error, std::move(partial));
  }
  std::vector<State> finals;
  for (auto& d : done) finals.push_back(std::move(*d));
  const double zeta_vacuum = 0.5 * (initial.c_star + initial.c_star_upper);
  return compare(plan, finals, base, zeta_vacuum);
}

}  // namespace mhdw::conv
