#pragma once

// Configuration files, initial-data expressions, snapshot and CSV formats.

#include "mhdw/convergence.hpp"
#include "mhdw/diagnostics.hpp"
#include "mhdw/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhdw::io {

// ---------------------------------------------------------------------------
// Expressions: numbers, x, y, pi, + - * / ^, parentheses, cos sin exp.

class ExpressionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Expression = std::function<double(double x, double y)>;
Expression parse_expression(const std::string& text);

// ---------------------------------------------------------------------------
// Config

struct InitialSpec {
  std::string rho, b, theta, u1, u2;  // expressions in x, y
  std::string snapshot;               // alternative: path of a snapshot file
  bool regularize = false;            // apply the spectral mollifier
};

struct OutputSpec {
  std::string directory = "out";
  bool csv = true;
  bool snapshots = true;
};

struct Config {
  disc::Grid grid;
  thermo::EosParams eos;
  solver::RegParams reg;
  solver::Schedule time;
  InitialSpec initial;
  OutputSpec output;
};

/// All violations found while loading, one message each.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> v);
  std::vector<std::string> violations;
};

/// INI text with sections [grid] [eos] [reg] [time] [initial] [output].
/// Required: grid.nx, grid.ny, time.t_final, time.dt and either all five
/// initial expressions or initial.snapshot. Everything else has the defaults
/// listed in config_defaults(). Snapshot paths are relative to base_dir.
Config parse_config(const std::string& text, const std::string& base_dir = ".");
Config load_config(const std::string& path);

/// Documented defaults as "section.key = value" lines.
std::string config_defaults();

/// Initial data described by the config (mollified if requested).
solver::InitialData initial_data(const Config& c);

// ---------------------------------------------------------------------------
// Snapshots: "MHDW", u32 version, u32 nx, u32 ny, f64 lx, f64 ly, f64 t, then
// rho, u1, u2, b, theta as nx*ny little-endian f64 each (y outer, x inner).

constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  disc::Grid grid;
  double t = 0.0;
  disc::ScalarField rho, b, theta;
  disc::VectorField u;
};

Snapshot snapshot_of(const solver::State& s);
void write_snapshot(const solver::State& s, const std::string& path);
void write_snapshot(const Snapshot& s, const std::string& path);
Snapshot read_snapshot(const std::string& path);
std::string encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(const std::string& bytes);

// ---------------------------------------------------------------------------
// CSV

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const diag::DiagnosticsReport& r);
void write_diagnostics_csv(const std::string& path, const std::vector<diag::DiagnosticsReport>& rows);

void write_sweep_csv(std::ostream& os, const conv::ConvergenceReport& r);
void write_sweep_csv(const std::string& path, const conv::ConvergenceReport& r);

}  // namespace mhdw::io
