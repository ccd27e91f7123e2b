#include "doctest.h"
#include "mhdw/cli_io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace mhdw;
using namespace mhdw::io;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[grid]
nx = 16
ny = 16
[time]
t_final = 0.1
dt = 0.01
[initial]
rho = 1 + 0.1*cos(pi*x)
b = 2
theta = 1
u1 = 0
u2 = 0
)";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations;
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("mhdw_test_" + name); }

Snapshot sample_snapshot() {
  disc::Grid g{8, 16, 2.0, 1.5};
  Snapshot s{g, 0.125, disc::ScalarField(g), disc::ScalarField(g), disc::ScalarField(g), disc::VectorField(g)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.rho.v[i] = 1.0 + 1e-3 * double(i) + 1.0 / 3.0;
    s.b.v[i] = std::nextafter(2.0, 3.0) * (1.0 + double(i));
    s.theta.v[i] = std::exp(0.01 * double(i));
    s.u.x[i] = -std::sin(double(i));
    s.u.y[i] = 1e-300 * double(i);
  }
  return s;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("expressions") {
  const double pi = std::numbers::pi;
  CHECK(parse_expression("1 + 2*3")(0, 0) == 7.0);
  CHECK(parse_expression("(1 + 2)*3")(0, 0) == 9.0);
  CHECK(parse_expression("2^3")(0, 0) == 8.0);
  CHECK(parse_expression("-x + +y")(2.0, 5.0) == 3.0);
  CHECK(parse_expression("1/4")(0, 0) == 0.25);
  CHECK(parse_expression("1.5e-1")(0, 0) == doctest::Approx(0.15));
  CHECK(parse_expression("cos(pi*x)*sin(pi*y)")(0.25, 0.5) == doctest::Approx(std::cos(pi / 4)));
  CHECK(parse_expression("exp(x)")(1.0, 0.0) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(parse_expression(""), ExpressionError);
  CHECK_THROWS_AS(parse_expression("1 +"), ExpressionError);
  CHECK_THROWS_AS(parse_expression("(1 + 2"), ExpressionError);
  CHECK_THROWS_AS(parse_expression("tan(x)"), ExpressionError);
  CHECK_THROWS_AS(parse_expression("z"), ExpressionError);
  CHECK_THROWS_AS(parse_expression("1 2"), ExpressionError);
}

TEST_CASE("minimal config takes the defaults") {
  auto c = parse_config(kMinimal);
  CHECK(c.grid.nx == 16);
  CHECK(c.grid.lx == 1.0);
  CHECK(c.eos.gamma == doctest::Approx(5.0 / 3.0));
  CHECK(c.eos.a == 1.0);
  CHECK(c.reg.epsilon == 1e-2);
  CHECK(c.reg.delta == 1e-2);
  CHECK(c.reg.Gamma == 8.0);
  CHECK(c.reg.n == 16);
  CHECK(c.time.steps() == 10);
  CHECK(c.output.csv);
  CHECK(c.output.snapshots);
  auto init = initial_data(c);
  CHECK(init.rho0.max() == doctest::Approx(1.1).epsilon(1e-3));
  CHECK(init.c_star < init.c_star_upper);
}

TEST_CASE("config defaults listing") {
  const std::string text = config_defaults();
  CHECK(text.find("reg.gamma_cap = 8") != std::string::npos);
  CHECK(text.find("reg.epsilon = 0.01") != std::string::npos);
  CHECK(text.find("output.formats = csv,snapshot") != std::string::npos);
}

TEST_CASE("constant expressions are allowed for numbers") {
  auto c = parse_config(std::string(kMinimal) + "[reg]\nepsilon = 1/50\n");
  CHECK(c.reg.epsilon == 0.02);
  CHECK(mentions(violations_of(std::string(kMinimal) + "[reg]\nepsilon = x\n"), "'reg.epsilon'"));
  CHECK(mentions(violations_of(std::string(kMinimal) + "[reg]\nn = 2.5\n"), "must be an integer"));
}

TEST_CASE("config rejections name the offence") {
  CHECK(mentions(violations_of(std::string(kMinimal) + "[reg]\ngamma_cap = 2\n"), "reg: Γ ≥ max(4, 2γ)"));
  CHECK(mentions(violations_of(std::string(kMinimal) + "[grid]\nnx = 16\n"), "duplicate key 'grid.nx'"));
  CHECK(mentions(violations_of(std::string(kMinimal) + "[reg]\nfoo = 1\n"), "unknown key 'foo' in [reg]"));
  CHECK(mentions(violations_of(std::string(kMinimal) + "[mystery]\n"), "unknown section 'mystery'"));
  CHECK(mentions(violations_of("[grid]\nnx = 16\n"), "missing required key 'grid.ny'"));
  CHECK(mentions(violations_of("[grid]\nnx = 16\n"), "missing required key 'time.dt'"));
  CHECK(mentions(violations_of("[grid]\nnx = 16\nny = 16\n[time]\nt_final = 1\ndt = 0.1\n"), "expressions"));

  auto many = violations_of(std::string(kMinimal) + "[reg]\nepsilon = -1\ngamma_cap = 2\nn = 1000\n");
  CHECK(many.size() >= 3);
  CHECK(mentions(many, "n exceeds"));
  try {
    parse_config(std::string(kMinimal) + "[reg]\nepsilon = -1\ngamma_cap = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(';') != std::string::npos);
  }

  // Non-positive density in the initial expressions.
  std::string neg = kMinimal;
  neg.replace(neg.find("1 + 0.1*cos(pi*x)"), 17, "x - 0.5");
  CHECK(mentions(violations_of(neg), "initial:"));
}

TEST_CASE("CFL violation at t = 0 is reported") {
  std::string fast = kMinimal;
  fast.replace(fast.find("u1 = 0"), 6, "u1 = 5*sin(pi*x)*sin(pi*y)");
  auto v = violations_of(fast);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("CFL") != std::string::npos);
}

TEST_CASE("snapshot round trip is bit exact") {
  const auto s = sample_snapshot();
  const auto bytes = encode_snapshot(s);
  CHECK(bytes.size() == 4 + 3 * 4 + 3 * 8 + 5 * 8 * s.grid.size());
  const auto back = decode_snapshot(bytes);
  CHECK(back.grid == s.grid);
  CHECK(back.t == s.t);
  CHECK(same_bits(back.rho.v, s.rho.v));
  CHECK(same_bits(back.b.v, s.b.v));
  CHECK(same_bits(back.theta.v, s.theta.v));
  CHECK(same_bits(back.u.x, s.u.x));
  CHECK(same_bits(back.u.y, s.u.y));

  const auto path = temp_path("roundtrip.bin").string();
  write_snapshot(s, path);
  const auto disk = read_snapshot(path);
  CHECK(encode_snapshot(disk) == bytes);
  fs::remove(path);
}

TEST_CASE("corrupt snapshots are rejected") {
  const auto bytes = encode_snapshot(sample_snapshot());
  CHECK_THROWS_WITH_AS(decode_snapshot(bytes.substr(0, bytes.size() - 1)), doctest::Contains("truncated"),
                       SnapshotError);
  CHECK_THROWS_AS(decode_snapshot(bytes + "x"), SnapshotError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 10)), SnapshotError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(magic), doctest::Contains("not a snapshot"), SnapshotError);
  auto version = bytes;
  version[4] = static_cast<char>(kSnapshotVersion + 1);
  CHECK_THROWS_WITH_AS(decode_snapshot(version), doctest::Contains("version"), SnapshotError);
  CHECK_THROWS_AS(read_snapshot(temp_path("does_not_exist.bin").string()), SnapshotError);
}

TEST_CASE("config can start from a snapshot") {
  const fs::path dir = temp_path("snapcfg");
  fs::create_directories(dir);
  disc::Grid g{16, 16, 1.0, 1.0};
  Snapshot s{g, 0.0, disc::ScalarField(g, 1.2), disc::ScalarField(g, 2.4), disc::ScalarField(g, 1.1),
             disc::VectorField(g)};
  write_snapshot(s, (dir / "start.bin").string());
  {
    std::ofstream f(dir / "c.ini");
    f << "[grid]\nnx = 16\nny = 16\n[time]\nt_final = 0.1\ndt = 0.01\n[initial]\nsnapshot = start.bin\n";
  }
  auto c = load_config((dir / "c.ini").string());
  auto init = initial_data(c);
  CHECK(init.rho0.min() == 1.2);
  CHECK(init.c_star == doctest::Approx(2.0));

  std::ofstream(dir / "d.ini") << "[grid]\nnx = 8\nny = 8\n[time]\nt_final = 0.1\ndt = 0.01\n[reg]\nn = 4\n"
                                  "[initial]\nsnapshot = start.bin\n";
  CHECK_THROWS_AS(load_config((dir / "d.ini").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.ini").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("diagnostics CSV layout") {
  std::ostringstream os;
  write_diagnostics_header(os);
  diag::DiagnosticsReport r;
  r.t = 0.5;
  r.floor_violations = 3;
  write_diagnostics_row(os, r);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::string expected;
  for (const char* n : diag::DiagnosticsReport::field_names()) expected += std::string(expected.empty() ? "" : ",") + n;
  CHECK(header == expected);
  CHECK(row.rfind("0.5,", 0) == 0);
  CHECK(row.substr(row.rfind(',') + 1) == "3");
}
