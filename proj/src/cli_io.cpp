#include "mhdw/cli_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

namespace mhdw::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// Expression parser (recursive descent into a closure tree)

struct Node {
  virtual ~Node() = default;
  virtual double eval(double x, double y) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Const : Node {
  double v;
  explicit Const(double v) : v(v) {}
  double eval(double, double) const override { return v; }
};
struct Var : Node {
  bool is_x;
  explicit Var(bool is_x) : is_x(is_x) {}
  double eval(double x, double y) const override { return is_x ? x : y; }
};
struct Unary : Node {
  double (*f)(double);
  NodePtr a;
  Unary(double (*f)(double), NodePtr a) : f(f), a(std::move(a)) {}
  double eval(double x, double y) const override { return f(a->eval(x, y)); }
};
struct Binary : Node {
  char op;
  NodePtr a, b;
  Binary(char op, NodePtr a, NodePtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
  double eval(double x, double y) const override {
    const double l = a->eval(x, y), r = b->eval(x, y);
    switch (op) {
      case '+': return l + r;
      case '-': return l - r;
      case '*': return l * r;
      case '/': return l / r;
      default: return std::pow(l, r);
    }
  }
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return n;
  }
  bool uses_xy = false;

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << what << " at position " << i_;
    throw ExpressionError(os.str());
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (eat('+')) n = std::make_shared<Binary>('+', n, term());
      else if (eat('-')) n = std::make_shared<Binary>('-', n, term());
      else return n;
    }
  }
  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (eat('*')) n = std::make_shared<Binary>('*', n, unary());
      else if (eat('/')) n = std::make_shared<Binary>('/', n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (eat('-')) return std::make_shared<Binary>('-', std::make_shared<Const>(0.0), unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    auto base = primary();
    if (eat('^')) return std::make_shared<Binary>('^', base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    const char c = s_[i_];
    if (c == '(') {
      ++i_;
      auto n = expr();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad number");
      i_ = static_cast<std::size_t>(p - s_.data());
      return std::make_shared<Const>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t b = i_;
      while (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_]))) ++i_;
      const std::string id = s_.substr(b, i_ - b);
      if (id == "x" || id == "y") {
        uses_xy = true;
        return std::make_shared<Var>(id == "x");
      }
      if (id == "pi") return std::make_shared<Const>(std::numbers::pi);
      double (*f)(double) = nullptr;
      if (id == "cos") f = [](double v) { return std::cos(v); };
      if (id == "sin") f = [](double v) { return std::sin(v); };
      if (id == "exp") f = [](double v) { return std::exp(v); };
      if (!f) {
        i_ = b;
        fail("unknown identifier '" + id + "'");
      }
      if (!eat('(')) fail("expected '(' after " + id);
      auto a = expr();
      if (!eat(')')) fail("missing ')'");
      return std::make_shared<Unary>(f, a);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Little-endian byte packing

template <class T>
void put(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  return v;
}

constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 3 * 8;

}  // namespace

Expression parse_expression(const std::string& text) {
  NodePtr n = Parser(text).parse();
  return [n](double x, double y) { return n->eval(x, y); };
}

// ---------------------------------------------------------------------------
// Config

ConfigError::ConfigError(std::vector<std::string> v)
    : std::invalid_argument([&] {
        std::string msg = "invalid config: ";
        for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
        return msg;
      }()),
      violations(std::move(v)) {}

std::string config_defaults() {
  const thermo::EosParams e;
  const solver::RegParams r;
  const solver::Schedule t;
  const OutputSpec o;
  std::ostringstream os;
  os.precision(17);
  os << "grid.lx = 1\ngrid.ly = 1\n"
     << "eos.gamma = " << e.gamma << "\neos.a = " << e.a << "\neos.c_v = " << e.c_v << "\neos.mu0 = " << e.mu0
     << "\neos.mu1 = " << e.mu1 << "\neos.kappa0 = " << e.kappa0 << "\neos.kappa2 = " << e.kappa2
     << "\neos.kappa3 = " << e.kappa3 << "\n"
     << "reg.epsilon = " << r.epsilon << "\nreg.delta = " << r.delta << "\nreg.gamma_cap = " << r.Gamma
     << "\nreg.n = " << r.n << "\nreg.theta_bar = " << r.theta_bar << "\nreg.picard_sweeps = " << r.picard_sweeps
     << "\n"
     << "time.snapshot_stride = " << t.snapshot_stride << "\n"
     << "initial.regularize = false\n"
     << "output.directory = " << o.directory << "\noutput.formats = csv,snapshot\n";
  return os.str();
}

Config parse_config(const std::string& text, const std::string& base_dir) {
  static const std::map<std::string, std::set<std::string>> kKeys{
      {"grid", {"nx", "ny", "lx", "ly"}},
      {"eos", {"gamma", "a", "c_v", "mu0", "mu1", "kappa0", "kappa2", "kappa3"}},
      {"reg", {"epsilon", "delta", "gamma_cap", "n", "theta_bar", "picard_sweeps"}},
      {"time", {"t_final", "dt", "snapshot_stride"}},
      {"initial", {"rho", "b", "theta", "u1", "u2", "snapshot", "regularize"}},
      {"output", {"directory", "formats"}},
  };
  std::vector<std::string> bad;
  std::map<std::string, std::string> kv;  // "section.key" -> raw value

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') {
        bad.push_back(where + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!kKeys.count(section)) bad.push_back(where + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad.push_back(where + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section.empty()) {
      bad.push_back(where + ": key '" + key + "' outside any section");
      continue;
    }
    auto sec = kKeys.find(section);
    if (sec == kKeys.end()) continue;  // already reported
    if (!sec->second.count(key)) {
      bad.push_back(where + ": unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    const std::string full = section + "." + key;
    if (kv.count(full)) bad.push_back(where + ": duplicate key '" + full + "'");
    kv[full] = value;
  }

  auto number = [&](const std::string& k, double& out, bool required) {
    auto it = kv.find(k);
    if (it == kv.end()) {
      if (required) bad.push_back("missing required key '" + k + "'");
      return;
    }
    try {
      Parser p(it->second);
      auto n = p.parse();
      if (p.uses_xy) throw ExpressionError("must be a constant");
      out = n->eval(0.0, 0.0);
      if (!std::isfinite(out)) throw ExpressionError("not finite");
    } catch (const ExpressionError& e) {
      bad.push_back("'" + k + "': " + e.what());
    }
  };
  auto integer = [&](const std::string& k, int& out, bool required) {
    double v = out;
    const std::size_t before = bad.size();
    number(k, v, required);
    if (bad.size() != before || !kv.count(k)) return;
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      bad.push_back("'" + k + "' must be an integer");
      return;
    }
    out = static_cast<int>(v);
  };

  Config c;
  c.grid.lx = c.grid.ly = 1.0;
  integer("grid.nx", c.grid.nx, true);
  integer("grid.ny", c.grid.ny, true);
  number("grid.lx", c.grid.lx, false);
  number("grid.ly", c.grid.ly, false);
  number("eos.gamma", c.eos.gamma, false);
  number("eos.a", c.eos.a, false);
  number("eos.c_v", c.eos.c_v, false);
  number("eos.mu0", c.eos.mu0, false);
  number("eos.mu1", c.eos.mu1, false);
  number("eos.kappa0", c.eos.kappa0, false);
  number("eos.kappa2", c.eos.kappa2, false);
  number("eos.kappa3", c.eos.kappa3, false);
  number("reg.epsilon", c.reg.epsilon, false);
  number("reg.delta", c.reg.delta, false);
  number("reg.gamma_cap", c.reg.Gamma, false);
  integer("reg.n", c.reg.n, false);
  number("reg.theta_bar", c.reg.theta_bar, false);
  integer("reg.picard_sweeps", c.reg.picard_sweeps, false);
  number("time.t_final", c.time.t_final, true);
  number("time.dt", c.time.dt, true);
  integer("time.snapshot_stride", c.time.snapshot_stride, false);

  auto str = [&](const std::string& k) { return kv.count(k) ? kv[k] : std::string(); };
  c.initial.rho = str("initial.rho");
  c.initial.b = str("initial.b");
  c.initial.theta = str("initial.theta");
  c.initial.u1 = str("initial.u1");
  c.initial.u2 = str("initial.u2");
  c.initial.snapshot = str("initial.snapshot");
  if (!c.initial.snapshot.empty() && std::filesystem::path(c.initial.snapshot).is_relative())
    c.initial.snapshot = (std::filesystem::path(base_dir) / c.initial.snapshot).string();
  if (kv.count("initial.regularize")) {
    const std::string v = kv["initial.regularize"];
    if (v == "true" || v == "1") c.initial.regularize = true;
    else if (v == "false" || v == "0") c.initial.regularize = false;
    else bad.push_back("'initial.regularize' must be true or false");
  }
  if (kv.count("output.directory")) c.output.directory = kv["output.directory"];
  if (kv.count("output.formats")) {
    c.output.csv = c.output.snapshots = false;
    std::istringstream fs(kv["output.formats"]);
    std::string f;
    while (std::getline(fs, f, ',')) {
      f = trim(f);
      if (f == "csv") c.output.csv = true;
      else if (f == "snapshot") c.output.snapshots = true;
      else if (!f.empty()) bad.push_back("output.formats: unknown format '" + f + "'");
    }
  }

  // Cross-field checks.
  bool grid_ok = true;
  try {
    c.grid.validate();
  } catch (const std::exception& e) {
    grid_ok = false;
    bad.push_back(std::string("grid: ") + e.what());
  }
  bool eos_ok = true;
  try {
    c.eos.validate();
  } catch (const std::exception& e) {
    eos_ok = false;
    bad.push_back(std::string("eos: ") + e.what());
  }
  for (auto& v : c.reg.violations(c.eos)) bad.push_back(v);
  if (grid_ok && c.reg.n > (c.grid.nx / 2 - 1) * (c.grid.ny / 2 - 1))
    bad.push_back("reg: n exceeds the Galerkin modes available on the grid");
  if (!(c.time.dt > 0.0)) bad.push_back("time: dt > 0");
  if (!(c.time.t_final >= 0.0)) bad.push_back("time: t_final >= 0");
  if (c.time.snapshot_stride < 1) bad.push_back("time: snapshot_stride >= 1");

  const bool any_expr = !(c.initial.rho + c.initial.b + c.initial.theta + c.initial.u1 + c.initial.u2).empty();
  const bool all_expr = !c.initial.rho.empty() && !c.initial.b.empty() && !c.initial.theta.empty() &&
                        !c.initial.u1.empty() && !c.initial.u2.empty();
  if (!c.initial.snapshot.empty() && any_expr) bad.push_back("initial: give either expressions or a snapshot, not both");
  else if (c.initial.snapshot.empty() && !all_expr)
    bad.push_back("initial: rho, b, theta, u1 and u2 expressions (or a snapshot) are required");
  else if (grid_ok && eos_ok && bad.empty()) {
    // Positivity and CFL admissibility of the data actually used at t = 0.
    try {
      auto init = initial_data(c);
      auto basis = disc::build_basis(init.rho0.grid, c.reg.n);
      auto u = disc::reconstruct(disc::project_velocity(init.u0, basis), basis);
      const double lim = solver::cfl_limit(u);
      if (c.time.dt > lim * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time: dt = " << c.time.dt << " violates the CFL limit " << lim << " at t = 0";
        bad.push_back(os.str());
      }
    } catch (const std::exception& e) {
      bad.push_back(std::string("initial: ") + e.what());
    }
  }
  if (!bad.empty()) throw ConfigError(std::move(bad));
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

solver::InitialData initial_data(const Config& c) {
  solver::InitialData raw;
  if (!c.initial.snapshot.empty()) {
    auto s = read_snapshot(c.initial.snapshot);
    if (!(s.grid == c.grid)) throw disc::GridMismatch("initial snapshot grid differs from the config grid");
    raw = solver::make_initial_data(s.rho, s.b, s.theta, s.u);
  } else {
    auto rho = parse_expression(c.initial.rho), b = parse_expression(c.initial.b);
    auto th = parse_expression(c.initial.theta), u1 = parse_expression(c.initial.u1);
    auto u2 = parse_expression(c.initial.u2);
    raw = solver::make_initial_data(disc::sample(c.grid, rho), disc::sample(c.grid, b), disc::sample(c.grid, th),
                                    disc::sample(c.grid, u1, u2));
  }
  return c.initial.regularize ? solver::regularize_initial_data(raw, c.reg) : raw;
}

// ---------------------------------------------------------------------------
// Snapshots

Snapshot snapshot_of(const solver::State& s) { return {s.grid(), s.t, s.rho, s.b, s.theta, s.u}; }

std::string encode_snapshot(const Snapshot& s) {
  const std::size_t n = s.grid.size();
  for (const auto* v : {&s.rho.v, &s.u.x, &s.u.y, &s.b.v, &s.theta.v})
    if (v->size() != n) throw SnapshotError("snapshot arrays must have nx*ny entries");
  std::string out;
  out.reserve(kHeaderBytes + 5 * 8 * n);
  out.append("MHDW", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.ny));
  put<double>(out, s.grid.lx);
  put<double>(out, s.grid.ly);
  put<double>(out, s.t);
  for (const auto* v : {&s.rho.v, &s.u.x, &s.u.y, &s.b.v, &s.theta.v})
    for (double d : *v) put<double>(out, d);
  return out;
}

Snapshot decode_snapshot(const std::string& in) {
  if (in.size() < 4 || in.compare(0, 4, "MHDW") != 0) throw SnapshotError("not a snapshot (bad magic)");
  if (in.size() < kHeaderBytes) throw SnapshotError("truncated snapshot header");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(in, pos);
  if (version != kSnapshotVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (expected " +
                        std::to_string(kSnapshotVersion) + ")");
  Snapshot s;
  s.grid.nx = static_cast<int>(get<std::uint32_t>(in, pos));
  s.grid.ny = static_cast<int>(get<std::uint32_t>(in, pos));
  s.grid.lx = get<double>(in, pos);
  s.grid.ly = get<double>(in, pos);
  s.t = get<double>(in, pos);
  try {
    s.grid.validate();
  } catch (const std::exception& e) {
    throw SnapshotError(std::string("snapshot header: ") + e.what());
  }
  const std::size_t n = s.grid.size();
  const std::size_t expected = kHeaderBytes + 5 * 8 * n;
  if (in.size() != expected) {
    std::ostringstream os;
    os << (in.size() < expected ? "truncated" : "oversized") << " snapshot: expected " << expected << " bytes, got "
       << in.size();
    throw SnapshotError(os.str());
  }
  s.rho = disc::ScalarField(s.grid);
  s.b = disc::ScalarField(s.grid);
  s.theta = disc::ScalarField(s.grid);
  s.u = disc::VectorField(s.grid);
  for (auto* v : {&s.rho.v, &s.u.x, &s.u.y, &s.b.v, &s.theta.v})
    for (double& d : *v) d = get<double>(in, pos);
  return s;
}

void write_snapshot(const Snapshot& s, const std::string& path) {
  const std::string bytes = encode_snapshot(s);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SnapshotError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SnapshotError("write failed for '" + path + "'");
}

void write_snapshot(const solver::State& s, const std::string& path) { write_snapshot(snapshot_of(s), path); }

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open snapshot '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_snapshot(ss.str());
}

// ---------------------------------------------------------------------------
// CSV

void write_diagnostics_header(std::ostream& os) {
  const auto& names = diag::DiagnosticsReport::field_names();
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << '\n';
}

void write_diagnostics_row(std::ostream& os, const diag::DiagnosticsReport& r) {
  const auto v = r.values();
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) line << v[i] << ',';
  line << r.floor_violations << '\n';
  os << line.str();
}

void write_diagnostics_csv(const std::string& path, const std::vector<diag::DiagnosticsReport>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_diagnostics_header(f);
  for (const auto& r : rows) write_diagnostics_row(f, r);
}

void write_sweep_csv(std::ostream& os, const conv::ConvergenceReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << conv::param_name(r.which)
      << ",rho_l1,rho_l2,b_l1,b_l2,theta_l1,theta_l2,u_l2,zeta_metric,"
         "art_rho_gamma,art_rho_sq,art_b_gamma,art_b_sq,art_theta_inv_sq\n";
  for (const auto& g : r.rungs)
    out << g.value << ',' << g.rho_l1 << ',' << g.rho_l2 << ',' << g.b_l1 << ',' << g.b_l2 << ',' << g.theta_l1 << ','
        << g.theta_l2 << ',' << g.u_l2 << ',' << g.zeta_metric << ',' << g.artificial.rho_gamma << ','
        << g.artificial.rho_sq << ',' << g.artificial.b_gamma << ',' << g.artificial.b_sq << ','
        << g.artificial.theta_inv_sq << '\n';
  os << out.str();
}

void write_sweep_csv(const std::string& path, const conv::ConvergenceReport& r) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_sweep_csv(f, r);
}

}  // namespace mhdw::io
