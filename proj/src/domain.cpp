#include "qrom/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrom/constants.hpp"
#include "qrom/errors.hpp"

namespace qrom {

namespace {

constexpr double kLengthTol = 1e-9;

int checked_intervals(double length, double h, const char* axis) {
  const double ratio = length / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > kLengthTol * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "domain length " << axis << " = " << length
       << " nm is not an integer multiple of h = " << h << " nm";
    throw ConfigError(os.str());
  }
  return static_cast<int>(rounded);
}

double wrap_distance(double d, double period, bool periodic) {
  if (!periodic) return d;
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

}  // namespace

Boundary parse_boundary(const std::string& name) {
  if (name == "dirichlet") return Boundary::DirichletZero;
  if (name == "neumann") return Boundary::NeumannZero;
  if (name == "periodic") return Boundary::Periodic;
  throw ConfigError("unknown boundary condition '" + name + "'");
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::DirichletZero: return "dirichlet";
    case Boundary::NeumannZero: return "neumann";
    case Boundary::Periodic: return "periodic";
  }
  return "?";
}

bool BoundaryConditions::has_dirichlet() const {
  return left == Boundary::DirichletZero || right == Boundary::DirichletZero ||
         bottom == Boundary::DirichletZero || top == Boundary::DirichletZero;
}

void BoundaryConditions::validate() const {
  if ((left == Boundary::Periodic) != (right == Boundary::Periodic))
    throw ConfigError("periodic boundary must be set on both left and right");
  if ((bottom == Boundary::Periodic) != (top == Boundary::Periodic))
    throw ConfigError("periodic boundary must be set on both bottom and top");
}

void StructureSpec::validate() const {
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("domain size must be positive");
  if (!(barrier.mass_ratio > 0.0) || !(well.mass_ratio > 0.0))
    throw ConfigError("effective mass ratios must be positive");
  if (!std::isfinite(barrier.band_edge) || !std::isfinite(well.band_edge))
    throw ConfigError("band edges must be finite");
  bc.validate();
  checked_intervals(lx, h, "Lx");
  checked_intervals(ly, h, "Ly");

  const auto& d = layout;
  if (d.rows < 0 || d.cols < 0) throw ConfigError("dot counts must be non-negative");
  if (d.rows == 0 || d.cols == 0) return;  // no dots: uniform barrier
  const double span_y = d.rows * d.dot_size + (d.rows - 1) * d.gap + 2.0 * d.spacer;
  const double span_x = d.cols * d.dot_size + (d.cols - 1) * d.gap + 2.0 * d.spacer;
  if (std::abs(span_y - ly) > kLengthTol * ly || std::abs(span_x - lx) > kLengthTol * lx) {
    std::ostringstream os;
    os << "dot layout spans " << span_x << " x " << span_y << " nm but domain is " << lx
       << " x " << ly << " nm";
    throw ConfigError(os.str());
  }
}

Grid::Grid(int nx, int ny, double h, BoundaryConditions bc)
    : nx_(nx), ny_(ny), h_(h), bc_(bc), weights_(static_cast<Eigen::Index>(size())) {
  if (nx < 1 || ny < 1 || !(h > 0.0)) throw ConfigError("invalid grid dimensions");
  bc_.validate();
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      weights_[static_cast<Eigen::Index>(index(i, j))] = axis_weight_x(i) * axis_weight_y(j);
}

double Grid::axis_weight_x(int i) const {
  if (bc_.periodic_x()) return h_;
  return (i == 0 || i == nx_ - 1) ? 0.5 * h_ : h_;
}

double Grid::axis_weight_y(int j) const {
  if (bc_.periodic_y()) return h_;
  return (j == 0 || j == ny_ - 1) ? 0.5 * h_ : h_;
}

bool Grid::is_dirichlet(int i, int j) const {
  return (i == 0 && bc_.left == Boundary::DirichletZero) ||
         (i == nx_ - 1 && bc_.right == Boundary::DirichletZero) ||
         (j == 0 && bc_.bottom == Boundary::DirichletZero) ||
         (j == ny_ - 1 && bc_.top == Boundary::DirichletZero);
}

Grid build_grid(const StructureSpec& spec) {
  spec.validate();
  const int ix = checked_intervals(spec.lx, spec.h, "Lx");
  const int iy = checked_intervals(spec.ly, spec.h, "Ly");
  const int nx = spec.bc.periodic_x() ? ix : ix + 1;
  const int ny = spec.bc.periodic_y() ? iy : iy + 1;
  return Grid(nx, ny, spec.h, spec.bc);
}

double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
             const Eigen::VectorXd& weights) {
  return (a.array() * b.array() * weights.array()).sum();
}

double norm(const Eigen::VectorXd& a, const Eigen::VectorXd& weights) {
  return std::sqrt(inner(a, a, weights));
}

bool inside_dot(const StructureSpec& spec, double x, double y) {
  const auto& d = spec.layout;
  if (d.rows == 0 || d.cols == 0) return false;
  const double tol = kLengthTol * spec.h + 1e-12;
  const double pitch = d.dot_size + d.gap;

  auto on_axis = [&](double coord, int count) {
    const double rel = coord - d.spacer;
    if (rel < -tol) return false;
    // Candidate dots: the one whose start is just at or below rel, and its
    // predecessor (for points on a closing edge when gap == 0).
    const int k = static_cast<int>(std::floor((rel + tol) / pitch));
    for (int c = std::max(0, k - 1); c <= std::min(count - 1, k); ++c) {
      const double lo = c * pitch;
      const double hi = lo + d.dot_size;
      if (rel >= lo - tol && rel <= hi + tol) return true;
    }
    return false;
  };
  return on_axis(x, d.cols) && on_axis(y, d.rows);
}

std::pair<MassField, ScalarField> sample_mass_and_base(const StructureSpec& spec,
                                                       const Grid& grid) {
  MassField mass(static_cast<Eigen::Index>(grid.size()));
  ScalarField base(static_cast<Eigen::Index>(grid.size()));
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const auto p = static_cast<Eigen::Index>(grid.index(i, j));
      const auto& m = inside_dot(spec, grid.x(i), grid.y(j)) ? spec.well : spec.barrier;
      mass[p] = m.mass_ratio;
      base[p] = m.band_edge;
    }
  }
  return {mass, base};
}

std::pair<ScalarField, ScalarField> field_terms(const Grid& grid) {
  const double xc = 0.5 * grid.lx();
  const double yc = 0.5 * grid.ly();
  ScalarField sx(static_cast<Eigen::Index>(grid.size()));
  ScalarField sy(static_cast<Eigen::Index>(grid.size()));
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const auto p = static_cast<Eigen::Index>(grid.index(i, j));
      sx[p] = (grid.x(i) - xc) * units::kFieldSlopePerKvCm;
      sy[p] = (grid.y(j) - yc) * units::kFieldSlopePerKvCm;
    }
  }
  return {sx, sy};
}

std::vector<PyramidSpec> default_pyramids(double lx, double ly, double base) {
  return {{0.25 * lx, 0.25 * ly, base},
          {0.75 * lx, 0.25 * ly, base},
          {0.5 * lx, 0.5 * ly, base},
          {0.25 * lx, 0.75 * ly, base},
          {0.75 * lx, 0.75 * ly, base}};
}

std::vector<ScalarField> pyramid_terms(const std::vector<PyramidSpec>& pyramids,
                                       const Grid& grid) {
  std::vector<ScalarField> shapes;
  shapes.reserve(pyramids.size());
  for (const auto& pyr : pyramids) {
    if (!(pyr.base > 0.0)) throw ConfigError("pyramid base must be positive");
    const double half = 0.5 * pyr.base;
    ScalarField s(static_cast<Eigen::Index>(grid.size()));
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        const double dx = wrap_distance(grid.x(i) - pyr.cx, grid.lx(), grid.bc().periodic_x());
        const double dy = wrap_distance(grid.y(j) - pyr.cy, grid.ly(), grid.bc().periodic_y());
        const double r = std::max(std::abs(dx), std::abs(dy)) / half;
        s[static_cast<Eigen::Index>(grid.index(i, j))] = std::max(0.0, 1.0 - r);
      }
    }
    shapes.push_back(std::move(s));
  }
  return shapes;
}

std::vector<std::string> PotentialAssembly::param_names() const {
  std::vector<std::string> names;
  names.reserve(terms.size());
  for (const auto& t : terms) names.push_back(t.name);
  return names;
}

ScalarField assemble_potential(const PotentialAssembly& assembly,
                               const ScenarioParams& params) {
  if (params.values.size() != assembly.terms.size()) {
    std::ostringstream os;
    os << "expected " << assembly.terms.size() << " parameters, got "
       << params.values.size();
    throw ConfigError(os.str());
  }
  ScalarField u = assembly.base;
  for (std::size_t k = 0; k < assembly.terms.size(); ++k) {
    if (params.values[k] != 0.0) u += params.values[k] * assembly.terms[k].shape;
  }
  return u;
}

}  // namespace qrom
