#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace qrom {

/// Grid-sampled scalar quantity, indexed by Grid::index(i, j).
using ScalarField = Eigen::VectorXd;
/// Relative effective mass m*/m0 sampled on the grid.
using MassField = Eigen::VectorXd;

enum class Boundary { DirichletZero, NeumannZero, Periodic };

Boundary parse_boundary(const std::string& name);
std::string to_string(Boundary b);

struct BoundaryConditions {
  Boundary left = Boundary::DirichletZero;
  Boundary right = Boundary::DirichletZero;
  Boundary bottom = Boundary::DirichletZero;
  Boundary top = Boundary::DirichletZero;

  static BoundaryConditions all(Boundary b) { return {b, b, b, b}; }

  bool periodic_x() const { return left == Boundary::Periodic; }
  bool periodic_y() const { return bottom == Boundary::Periodic; }
  bool has_dirichlet() const;

  /// Throws ConfigError unless Periodic is set pairwise on opposite sides.
  void validate() const;
};

struct MaterialParams {
  double mass_ratio = 1.0;  // m*/m0
  double band_edge = 0.0;   // eV
};

struct DotLayout {
  int rows = 0;
  int cols = 0;
  double dot_size = 0.0;  // nm
  double gap = 0.0;       // nm
  double spacer = 0.0;    // nm
};

struct StructureSpec {
  double lx = 0.0;  // nm
  double ly = 0.0;  // nm
  DotLayout layout;
  MaterialParams barrier;
  MaterialParams well;
  BoundaryConditions bc;
  double h = 0.1;  // grid spacing, nm

  /// Checks layout closure, pairwise periodicity and integral Lx/h, Ly/h.
  void validate() const;
};

/// Uniform tensor grid with trapezoidal (non-periodic) or uniform (periodic)
/// quadrature weights. Point (i, j) sits at (i h, j h); storage is row-major
/// with x fastest: index = j * nx + i.
class Grid {
 public:
  Grid(int nx, int ny, double h, BoundaryConditions bc);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  const BoundaryConditions& bc() const { return bc_; }

  double x(int i) const { return i * h_; }
  double y(int j) const { return j * h_; }
  double lx() const { return bc_.periodic_x() ? nx_ * h_ : (nx_ - 1) * h_; }
  double ly() const { return bc_.periodic_y() ? ny_ * h_ : (ny_ - 1) * h_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  /// 1D quadrature factor along x (h, or h/2 on a non-periodic edge).
  double axis_weight_x(int i) const;
  double axis_weight_y(int j) const;

  const Eigen::VectorXd& weights() const { return weights_; }

  /// True when the point lies on a DirichletZero side and is eliminated.
  bool is_dirichlet(int i, int j) const;

  bool same_layout(const Grid& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && h_ == other.h_;
  }

 private:
  int nx_;
  int ny_;
  double h_;
  BoundaryConditions bc_;
  Eigen::VectorXd weights_;
};

Grid build_grid(const StructureSpec& spec);

/// Weighted inner product sum_p w_p a_p b_p.
double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
             const Eigen::VectorXd& weights);
double norm(const Eigen::VectorXd& a, const Eigen::VectorXd& weights);

/// True when (x, y) lies in one of the (closed) dot rectangles.
bool inside_dot(const StructureSpec& spec, double x, double y);

/// Relative mass and band-edge landscape: well material inside dots,
/// barrier material elsewhere.
std::pair<MassField, ScalarField> sample_mass_and_base(const StructureSpec& spec,
                                                       const Grid& grid);

/// Unit tilts (x - xc) and (y - yc) scaled so a parameter in kV/cm yields eV.
std::pair<ScalarField, ScalarField> field_terms(const Grid& grid);

struct PyramidSpec {
  double cx = 0.0;    // nm
  double cy = 0.0;    // nm
  double base = 0.0;  // full base width, nm
};

/// Four pyramids on the quarter points plus one at the centre.
std::vector<PyramidSpec> default_pyramids(double lx, double ly, double base);

/// Unit-height square pyramids, max(0, 1 - max(|dx|,|dy|) / (base/2)).
/// Distances use the minimum image along periodic axes.
std::vector<ScalarField> pyramid_terms(const std::vector<PyramidSpec>& pyramids,
                                       const Grid& grid);

struct ScenarioParams {
  std::vector<double> values;
};

struct PotentialTerm {
  std::string name;
  ScalarField shape;  // eV per parameter unit
};

/// U(r) = base(r) + sum_k p_k shape_k(r).
struct PotentialAssembly {
  ScalarField base;
  std::vector<PotentialTerm> terms;

  std::vector<std::string> param_names() const;
  std::size_t param_count() const { return terms.size(); }
};

ScalarField assemble_potential(const PotentialAssembly& assembly,
                               const ScenarioParams& params);

}  // namespace qrom
