#include "mhdw/discretization.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>
#include <utility>

namespace mhdw::disc {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

enum Kind { kCos10 = 0, kCos01 = 1, kSin10 = 2, kSin01 = 3 };

constexpr fftw_r2r_kind kFftwKind[4] = {FFTW_REDFT10, FFTW_REDFT01, FFTW_RODFT10, FFTW_RODFT01};

int analysis_kind(Parity p) { return p == Parity::Even ? kCos10 : kSin10; }
int synthesis_kind(Parity p) { return p == Parity::Even ? kCos01 : kSin01; }

// Sum of B_k(x_i)^2 over the N nodes of one axis.
double axis_norm(Parity p, int k, int n) {
  if (p == Parity::Even) return k == 0 ? n : 0.5 * n;
  return k == n - 1 ? n : 0.5 * n;
}

// Weight that turns series coefficients into FFTW type-01 inputs.
double synthesis_weight(Parity p, int k, int n) {
  if (p == Parity::Even) return k == 0 ? 1.0 : 0.5;
  return k == n - 1 ? 1.0 : 0.5;
}

}  // namespace

void Grid::validate() const {
  std::ostringstream os;
  if (nx < 8 || !is_power_of_two(nx)) os << "grid: nx must be a power of two >= 8 (got " << nx << "); ";
  if (ny < 8 || !is_power_of_two(ny)) os << "grid: ny must be a power of two >= 8 (got " << ny << "); ";
  if (!(lx > 0.0)) os << "grid: lx > 0; ";
  if (!(ly > 0.0)) os << "grid: ly > 0; ";
  if (!os.str().empty()) throw std::invalid_argument(os.str());
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
  if (v.size() != g.size()) throw std::invalid_argument("ScalarField: value count must equal nx*ny");
}

double ScalarField::min() const { return *std::min_element(v.begin(), v.end()); }
double ScalarField::max() const { return *std::max_element(v.begin(), v.end()); }

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

VectorField sample(const Grid& g, const std::function<double(double, double)>& fx,
                   const std::function<double(double, double)>& fy) {
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out.x[g.index(i, j)] = fx(g.x(i), g.y(j));
      out.y[g.index(i, j)] = fy(g.x(i), g.y(j));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Transforms

struct Transforms::Plans {
  fftw_plan plan[2][4] = {};
};

Transforms::Transforms(const Grid& g) : grid_(g), plans_(std::make_unique<Plans>()) {
  g.validate();
  std::vector<double> a(g.size(), 0.0), b(g.size(), 0.0);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  for (int kind = 0; kind < 4; ++kind) {
    int nxx = g.nx;
    int nyy = g.ny;
    fftw_r2r_kind k = kFftwKind[kind];
    // Along x: ny contiguous lines of length nx.
    plans_->plan[0][kind] =
        fftw_plan_many_r2r(1, &nxx, g.ny, a.data(), nullptr, 1, g.nx, b.data(), nullptr, 1, g.nx, &k, flags);
    // Along y: nx strided lines of length ny.
    plans_->plan[1][kind] =
        fftw_plan_many_r2r(1, &nyy, g.nx, a.data(), nullptr, g.nx, 1, b.data(), nullptr, g.nx, 1, &k, flags);
  }
}

Transforms::~Transforms() {
  std::lock_guard lock(planner_mutex());
  for (auto& axis : plans_->plan)
    for (auto& p : axis)
      if (p) fftw_destroy_plan(p);
}

std::shared_ptr<const Transforms> Transforms::for_grid(const Grid& g) {
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const Transforms>> cache;
  std::lock_guard lock(cache_mutex);
  auto key = std::make_tuple(g.nx, g.ny, g.lx, g.ly);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<const Transforms>(g)).first;
  return it->second;
}

void Transforms::pass(Axis axis, int kind, const double* in, double* out) const {
  fftw_execute_r2r(plans_->plan[axis == Axis::X ? 0 : 1][kind], const_cast<double*>(in), out);
}

void Transforms::scale_axis(std::vector<double>& a, Axis axis, const std::function<double(int)>& m) const {
  const int nx = grid_.nx, ny = grid_.ny;
  if (axis == Axis::X) {
    std::vector<double> w(nx);
    for (int i = 0; i < nx; ++i) w[i] = m(i);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) a[static_cast<std::size_t>(j) * nx + i] *= w[i];
  } else {
    for (int j = 0; j < ny; ++j) {
      const double w = m(j);
      for (int i = 0; i < nx; ++i) a[static_cast<std::size_t>(j) * nx + i] *= w;
    }
  }
}

std::vector<double> Transforms::basis_sums(std::span<const double> f, Parity px, Parity py) const {
  std::vector<double> tmp(grid_.size()), out(grid_.size());
  pass(Axis::X, analysis_kind(px), f.data(), tmp.data());
  pass(Axis::Y, analysis_kind(py), tmp.data(), out.data());
  for (double& v : out) v *= 0.25;  // FFTW type-10 transforms carry a factor 2 per axis
  return out;
}

std::vector<double> Transforms::synthesize(std::span<const double> c, Parity px, Parity py) const {
  std::vector<double> in(c.begin(), c.end()), tmp(grid_.size()), out(grid_.size());
  const int nx = grid_.nx, ny = grid_.ny;
  scale_axis(in, Axis::X, [&](int k) { return synthesis_weight(px, k, nx); });
  scale_axis(in, Axis::Y, [&](int k) { return synthesis_weight(py, k, ny); });
  pass(Axis::X, synthesis_kind(px), in.data(), tmp.data());
  pass(Axis::Y, synthesis_kind(py), tmp.data(), out.data());
  return out;
}

std::vector<double> Transforms::coefficients(std::span<const double> f, Parity px, Parity py) const {
  auto s = basis_sums(f, px, py);
  const int nx = grid_.nx, ny = grid_.ny;
  scale_axis(s, Axis::X, [&](int k) { return 1.0 / axis_norm(px, k, nx); });
  scale_axis(s, Axis::Y, [&](int k) { return 1.0 / axis_norm(py, k, ny); });
  return s;
}

std::vector<double> Transforms::derivative(std::span<const double> f, Axis axis, Parity parity) const {
  const int n = axis == Axis::X ? grid_.nx : grid_.ny;
  const double wave = kPi / (axis == Axis::X ? grid_.lx : grid_.ly);
  std::vector<double> raw(grid_.size()), shifted(grid_.size(), 0.0), out(grid_.size());
  pass(axis, analysis_kind(parity), f.data(), raw.data());

  // raw holds 2*sum per slot; series coefficient = raw / (2 * axis_norm).
  const int nx = grid_.nx, ny = grid_.ny;
  const int lines = axis == Axis::X ? ny : nx;
  const std::size_t stride = axis == Axis::X ? 1 : static_cast<std::size_t>(nx);
  const Parity target = parity == Parity::Even ? Parity::Odd : Parity::Even;
  for (int line = 0; line < lines; ++line) {
    const std::size_t base = axis == Axis::X ? static_cast<std::size_t>(line) * nx : line;
    for (int m = 1; m < n; ++m) {
      if (parity == Parity::Even) {
        // d/dx cos(m w x) = -m w sin(m w x): cosine slot m -> sine slot m-1
        const double c = raw[base + m * stride] / (2.0 * axis_norm(parity, m, n));
        shifted[base + (m - 1) * stride] = -c * m * wave * synthesis_weight(target, m - 1, n);
      } else {
        // d/dx sin(m w x) = m w cos(m w x): sine slot m-1 -> cosine slot m.
        // Mode n differentiates to cos(n w x), which vanishes on every node.
        const double c = raw[base + (m - 1) * stride] / (2.0 * axis_norm(parity, m - 1, n));
        shifted[base + m * stride] = c * m * wave * synthesis_weight(target, m, n);
      }
    }
  }
  pass(axis, synthesis_kind(target), shifted.data(), out.data());
  return out;
}

std::vector<double> Transforms::laplacian(std::span<const double> f) const {
  const double wx = kPi / grid_.lx, wy = kPi / grid_.ly;
  return filter(f, [&](int k, int l) { return -(k * k * wx * wx + l * l * wy * wy); });
}

std::vector<double> Transforms::solve_shifted_laplacian(std::span<const double> f, double alpha) const {
  const double wx = kPi / grid_.lx, wy = kPi / grid_.ly;
  return filter(f, [&](int k, int l) { return 1.0 / (1.0 + alpha * (k * k * wx * wx + l * l * wy * wy)); });
}

std::vector<double> Transforms::filter(std::span<const double> f,
                                       const std::function<double(int, int)>& mult) const {
  auto c = coefficients(f, Parity::Even, Parity::Even);
  for (int l = 0; l < grid_.ny; ++l)
    for (int k = 0; k < grid_.nx; ++k) c[grid_.index(k, l)] *= mult(k, l);
  return synthesize(c, Parity::Even, Parity::Even);
}

// ---------------------------------------------------------------------------
// Field operators

VectorField gradient(const ScalarField& f) {
  auto tr = Transforms::for_grid(f.grid);
  VectorField g(f.grid);
  g.x = tr->derivative(f.v, Axis::X, Parity::Even);
  g.y = tr->derivative(f.v, Axis::Y, Parity::Even);
  return g;
}

ScalarField divergence(const VectorField& v) {
  auto tr = Transforms::for_grid(v.grid);
  auto dx = tr->derivative(v.x, Axis::X, Parity::Odd);
  auto dy = tr->derivative(v.y, Axis::Y, Parity::Odd);
  ScalarField out(v.grid);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = dx[i] + dy[i];
  return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
  return ScalarField(f.grid, Transforms::for_grid(f.grid)->laplacian(f.v));
}

double integrate(std::span<const double> f, const Grid& g) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_area();
}

double integrate(const ScalarField& f) { return integrate(f.v, f.grid); }

double inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid, g.grid, "inner_product");
  double s = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * g.v[i];
  return s * f.grid.cell_area();
}

double inner_product(const VectorField& f, const VectorField& g) {
  require_same_grid(f.grid, g.grid, "inner_product");
  double s = 0.0;
  for (std::size_t i = 0; i < f.x.size(); ++i) s += f.x[i] * g.x[i] + f.y[i] * g.y[i];
  return s * f.grid.cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner_product(f, f)); }

// ---------------------------------------------------------------------------
// Galerkin basis

GalerkinBasis build_basis(const Grid& g, int n) {
  g.validate();
  const int kmax = g.nx / 2 - 1, lmax = g.ny / 2 - 1;
  if (n < 1 || n > kmax * lmax) {
    std::ostringstream os;
    os << "build_basis: n must lie in [1, " << kmax * lmax << "] for a " << g.nx << "x" << g.ny
       << " grid (got " << n << ")";
    throw std::invalid_argument(os.str());
  }
  std::vector<Mode> all;
  for (int k = 1; k <= kmax; ++k)
    for (int l = 1; l <= lmax; ++l) all.push_back({k, l});
  std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
    const int ra = a.k * a.k + a.l * a.l, rb = b.k * b.k + b.l * b.l;
    if (ra != rb) return ra < rb;
    return a.k != b.k ? a.k < b.k : a.l < b.l;
  });
  all.resize(n);
  return {g, std::move(all)};
}

double GalerkinBasis::gradient_norm2(int m) const {
  const Mode& md = modes[m];
  const double wx = md.k * kPi / grid.lx, wy = md.l * kPi / grid.ly;
  return mode_norm2() * (wx * wx + wy * wy);
}

std::vector<double> GalerkinBasis::mode_values(int m) const {
  const Mode& md = modes[m];
  std::vector<double> out(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      out[grid.index(i, j)] =
          std::sin(md.k * kPi * grid.x(i) / grid.lx) * std::sin(md.l * kPi * grid.y(j) / grid.ly);
  return out;
}

std::vector<double> project_velocity(const VectorField& v, const GalerkinBasis& basis) {
  require_same_grid(v.grid, basis.grid, "project_velocity");
  const int n = basis.n();
  std::vector<double> out(2 * n);
  for (int c = 0; c < 2; ++c) {
    auto t = test_value(c == 0 ? v.x : v.y, basis);
    for (int m = 0; m < n; ++m) out[c * n + m] = t[m] / basis.mode_norm2();
  }
  return out;
}

VectorField reconstruct(std::span<const double> coeffs, const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  const int n = basis.n();
  if (static_cast<int>(coeffs.size()) != 2 * n)
    throw std::invalid_argument("reconstruct: coefficient vector length must be 2n");
  auto tr = Transforms::for_grid(g);
  VectorField out(g);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> slots(g.size(), 0.0);
    for (int m = 0; m < n; ++m) slots[g.index(basis.modes[m].k - 1, basis.modes[m].l - 1)] = coeffs[c * n + m];
    (c == 0 ? out.x : out.y) = tr->synthesize(slots, Parity::Odd, Parity::Odd);
  }
  return out;
}

VelocityGradient velocity_gradient(std::span<const double> coeffs, const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  const int n = basis.n();
  auto tr = Transforms::for_grid(g);
  VelocityGradient out;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> sx(g.size(), 0.0), sy(g.size(), 0.0);
    for (int m = 0; m < n; ++m) {
      const Mode& md = basis.modes[m];
      const double a = coeffs[c * n + m];
      sx[g.index(md.k, md.l - 1)] = a * md.k * kPi / g.lx;  // cos(k) sin(l)
      sy[g.index(md.k - 1, md.l)] = a * md.l * kPi / g.ly;  // sin(k) cos(l)
    }
    out.d[c][0] = tr->synthesize(sx, Parity::Even, Parity::Odd);
    out.d[c][1] = tr->synthesize(sy, Parity::Odd, Parity::Even);
  }
  return out;
}

std::vector<double> test_dx(std::span<const double> F, const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  auto s = Transforms::for_grid(g)->basis_sums(F, Parity::Even, Parity::Odd);
  std::vector<double> out(basis.n());
  for (int m = 0; m < basis.n(); ++m) {
    const Mode& md = basis.modes[m];
    out[m] = g.cell_area() * md.k * kPi / g.lx * s[g.index(md.k, md.l - 1)];
  }
  return out;
}

std::vector<double> test_dy(std::span<const double> F, const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  auto s = Transforms::for_grid(g)->basis_sums(F, Parity::Odd, Parity::Even);
  std::vector<double> out(basis.n());
  for (int m = 0; m < basis.n(); ++m) {
    const Mode& md = basis.modes[m];
    out[m] = g.cell_area() * md.l * kPi / g.ly * s[g.index(md.k - 1, md.l)];
  }
  return out;
}

std::vector<double> test_value(std::span<const double> F, const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  auto s = Transforms::for_grid(g)->basis_sums(F, Parity::Odd, Parity::Odd);
  std::vector<double> out(basis.n());
  for (int m = 0; m < basis.n(); ++m) {
    const Mode& md = basis.modes[m];
    out[m] = g.cell_area() * s[g.index(md.k - 1, md.l - 1)];
  }
  return out;
}

std::vector<double> weighted_mass_matrix(const ScalarField& rho, const GalerkinBasis& basis) {
  require_same_grid(rho.grid, basis.grid, "weighted_mass_matrix");
  const Grid& g = basis.grid;
  // G(P,Q) = <rho, cos(P pi x/lx) cos(Q pi y/ly)>; exact lookup because P, Q < N.
  auto s = Transforms::for_grid(g)->basis_sums(rho.v, Parity::Even, Parity::Even);
  auto G = [&](int P, int Q) { return g.cell_area() * s[g.index(P, Q)]; };
  const int n = basis.n();
  std::vector<double> M(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const Mode& ma = basis.modes[a];
      const Mode& mb = basis.modes[b];
      // sin(k)sin(k') = (cos(k-k') - cos(k+k')) / 2 per axis
      const int dk = std::abs(ma.k - mb.k), sk = ma.k + mb.k;
      const int dl = std::abs(ma.l - mb.l), sl = ma.l + mb.l;
      const double v = 0.25 * (G(dk, dl) - G(dk, sl) - G(sk, dl) + G(sk, sl));
      M[static_cast<std::size_t>(a) * n + b] = v;
      M[static_cast<std::size_t>(b) * n + a] = v;
    }
  return M;
}

}  // namespace mhdw::disc
