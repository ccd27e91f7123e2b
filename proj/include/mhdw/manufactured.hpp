#pragma once

// Manufactured solutions: analytic fields carried as second-order jets so the
// forcing of every equation is exact, plus the order-of-accuracy studies.

#include "mhdw/solver.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace mhdw::mms {

/// Value with d/dt, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2.
struct Jet {
  double v = 0, t = 0, x = 0, y = 0, xx = 0, xy = 0, yy = 0;

  static Jet constant(double c) { return {c, 0, 0, 0, 0, 0, 0}; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(const Jet& a, double c);
Jet operator+(double c, const Jet& a);
Jet operator-(const Jet& a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(const Jet& a, double c);
Jet operator*(double c, const Jet& a);
Jet operator/(const Jet& a, double c);

/// f(a) given f, f', f'' at a.v.
Jet chain(const Jet& a, double f, double df, double d2f);
Jet pow(const Jet& a, double e);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

/// First partial derivative as a jet; its own second derivatives (and time
/// derivative) are unknown and set to NaN.
Jet dx(const Jet& a);
Jet dy(const Jet& a);

/// Elementary jets of the coordinates at (t, x, y).
Jet coord_x(double x);
Jet coord_y(double y);
Jet coord_t(double t);

using JetField = std::function<Jet(double t, double x, double y)>;

struct ManufacturedSolution {
  JetField rho;
  JetField b;
  JetField theta;
  JetField u1;
  JetField u2;
};

/// Throws std::invalid_argument if u does not vanish on the boundary or a
/// scalar has a non-zero normal derivative there (checked on sample points).
void check_boundary_conditions(const ManufacturedSolution& sol, double lx, double ly, double t = 0.0);

/// Residual forcing of each equation for the analytic fields at time t.
solver::Forcing manufactured_forcing(const ManufacturedSolution& sol, double t, const disc::Grid& g,
                                     const solver::RegParams& reg, const thermo::EosParams& p);

solver::ForcingFn forcing_function(const ManufacturedSolution& sol, const disc::Grid& g,
                                   const solver::RegParams& reg, const thermo::EosParams& p);

/// Fields sampled at time t.
solver::InitialData sample_solution(const ManufacturedSolution& sol, const disc::Grid& g, double t);

/// Largest relative discrete L2 error over rho, b, theta and u.
double solution_error(const solver::State& s, const ManufacturedSolution& sol);

struct MmsCase {
  ManufacturedSolution sol;
  solver::RegParams reg;
  thermo::EosParams eos;
  double lx = 1.0;
  double ly = 1.0;
};

/// Steady fields rho* = b* = 2 + 0.1 cos(pi x) cos(pi y), theta* = 1 and a
/// small two-mode no-slip velocity.
MmsCase steady_case();
/// Time-dependent fields of the same shape.
MmsCase unsteady_case();

struct OrderStudy {
  std::vector<double> parameter;  // h or dt per run
  std::vector<double> error;
  std::vector<double> order;      // log2 ratios of consecutive errors
  double min_order() const;
};

/// Grid doubling at fixed dt and final time.
OrderStudy spatial_order(const MmsCase& c, const std::vector<int>& grids, double dt, double t_final);
/// dt halving on a fixed grid.
OrderStudy temporal_order(const MmsCase& c, int grid, const std::vector<double>& dts, double t_final);

}  // namespace mhdw::mms
