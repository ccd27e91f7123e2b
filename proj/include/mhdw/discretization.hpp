#pragma once

// Rectangle grids and tensor-product trigonometric bases.
//
// Nodes are cell centres x_i = (i + 1/2) lx / nx.  Along each axis a nodal
// array is read either as a cosine series (Neumann scalars, index k = 0..N-1)
// or as a sine series (no-slip velocity, modes m = 1..N).  The midpoint rule
// on these nodes integrates every cosine of index < 2N exactly, which makes
// the discrete L2 inner product the Gram form of both bases and gives an
// exact discrete integration by parts between the two.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace mhdw::disc {

enum class Parity { Even, Odd };  // cosine / sine along one axis
enum class Axis { X, Y };

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  /// nx, ny powers of two >= 8 and positive side lengths; throws std::invalid_argument.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx * ly; }
  double x(int i) const { return (i + 0.5) * hx(); }
  double y(int j) const { return (j + 0.5) * hy(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  bool operator==(const Grid&) const = default;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Nodal scalar on a grid, row-major with y outer and x inner.
struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : grid(g), v(g.size(), value) {}
  ScalarField(const Grid& g, std::vector<double> values);

  double& operator()(int i, int j) { return v[grid.index(i, j)]; }
  double operator()(int i, int j) const { return v[grid.index(i, j)]; }
  double min() const;
  double max() const;
};

struct VectorField {
  Grid grid;
  std::vector<double> x;  // first component
  std::vector<double> y;  // second component

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}
  ScalarField component(int c) const { return ScalarField(grid, c == 0 ? x : y); }
};

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);
VectorField sample(const Grid& g, const std::function<double(double, double)>& fx,
                   const std::function<double(double, double)>& fy);

/// Low-level tensor-product trigonometric transforms on one grid.
///
/// Index layout of a coefficient array matches the nodal layout; along an
/// Even axis slot k holds cos(k pi x / L), along an Odd axis slot k holds
/// sin((k+1) pi x / L).
class Transforms {
 public:
  explicit Transforms(const Grid& g);
  ~Transforms();
  Transforms(const Transforms&) = delete;
  Transforms& operator=(const Transforms&) = delete;

  /// Shared, thread-safe instance for a grid size.
  static std::shared_ptr<const Transforms> for_grid(const Grid& g);

  const Grid& grid() const { return grid_; }

  /// sums[l,k] = sum_{i,j} f(i,j) Bx_k(x_i) By_l(y_j): discrete inner products
  /// (without the cell area) of f with every basis product.
  std::vector<double> basis_sums(std::span<const double> f, Parity px, Parity py) const;
  /// f(i,j) = sum_{l,k} c[l,k] Bx_k(x_i) By_l(y_j).
  std::vector<double> synthesize(std::span<const double> c, Parity px, Parity py) const;
  /// Expansion coefficients of the trigonometric interpolant of f.
  std::vector<double> coefficients(std::span<const double> f, Parity px, Parity py) const;
  /// Nodal derivative along one axis of a field with the given parity on that
  /// axis; the result has the opposite parity on that axis.
  std::vector<double> derivative(std::span<const double> f, Axis axis, Parity parity) const;
  /// Even-even fields: nodal Neumann Laplacian.
  std::vector<double> laplacian(std::span<const double> f) const;
  /// Even-even fields: solve (I - alpha Lap) g = f.
  std::vector<double> solve_shifted_laplacian(std::span<const double> f, double alpha) const;
  /// Even-even fields: multiply cosine coefficient (k,l) by mult(k,l).
  std::vector<double> filter(std::span<const double> f,
                             const std::function<double(int, int)>& mult) const;

 private:
  struct Plans;
  void pass(Axis axis, int kind, const double* in, double* out) const;
  // Multiply along one axis: a[...] *= m(axis index).
  void scale_axis(std::vector<double>& a, Axis axis, const std::function<double(int)>& m) const;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
};

// Spectral operators consistent with the boundary conditions: scalars are
// cosine (Neumann) fields, velocity components sine (no-slip) fields.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian_neumann(const ScalarField& f);

double integrate(const ScalarField& f);
double integrate(std::span<const double> f, const Grid& g);
double inner_product(const ScalarField& f, const ScalarField& g);
double inner_product(const VectorField& f, const VectorField& g);
double l2_norm(const ScalarField& f);

struct Mode {
  int k;  // x wavenumber, >= 1
  int l;  // y wavenumber, >= 1
  bool operator==(const Mode&) const = default;
};

/// sin(k pi x/lx) sin(l pi y/ly) modes per velocity component; the modes are
/// the first n of the box [1, nx/2-1] x [1, ny/2-1] ordered by k^2 + l^2 and
/// then lexicographically.
struct GalerkinBasis {
  Grid grid;
  std::vector<Mode> modes;

  int n() const { return static_cast<int>(modes.size()); }
  /// Coefficient vector length: n per component, component-major.
  int dim() const { return 2 * n(); }
  /// Discrete L2 norm squared of every mode, lx*ly/4.
  double mode_norm2() const { return grid.area() / 4.0; }
  /// |grad phi_m|^2 integrated.
  double gradient_norm2(int m) const;
  /// Nodal values of mode m (scalar factor).
  std::vector<double> mode_values(int m) const;
};

GalerkinBasis build_basis(const Grid& g, int n);

/// Orthogonal L2 projection coefficients (component-major, length 2n).
std::vector<double> project_velocity(const VectorField& v, const GalerkinBasis& basis);
VectorField reconstruct(std::span<const double> coeffs, const GalerkinBasis& basis);

/// Nodal velocity gradient of a Galerkin field: d[c][a] = d u_c / d x_a.
struct VelocityGradient {
  std::vector<double> d[2][2];
};
VelocityGradient velocity_gradient(std::span<const double> coeffs, const GalerkinBasis& basis);

/// Discrete Galerkin functionals, each returning a vector of length n for one
/// velocity component test space:
///   <F, d phi_m / dx>,  <F, d phi_m / dy>,  <F, phi_m>.
std::vector<double> test_dx(std::span<const double> F, const GalerkinBasis& basis);
std::vector<double> test_dy(std::span<const double> F, const GalerkinBasis& basis);
std::vector<double> test_value(std::span<const double> F, const GalerkinBasis& basis);

/// Gram matrix entries <rho phi_j, phi_m> (identical for both components),
/// n x n row-major.
std::vector<double> weighted_mass_matrix(const ScalarField& rho, const GalerkinBasis& basis);

}  // namespace mhdw::disc
