#include "qrom/rom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qrom/constants.hpp"
#include "qrom/dns.hpp"
#include "qrom/errors.hpp"
#include "qrom/kernels.hpp"

namespace qrom {

namespace {

double asymmetry(const Eigen::MatrixXd& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a, double& defect) {
  defect = std::max(defect, asymmetry(a));
  return 0.5 * (a + a.transpose());
}

Eigen::VectorXd kinetic_coefficient(const MassField& mass) {
  return units::kHbar2Over2m0 / mass.array();
}

// d/dx of one mode at (i, j); second-order everywhere.
double ddx(const Eigen::MatrixXd& modes, Eigen::Index col, const Grid& g, int i, int j) {
  const int nx = g.nx();
  const double h = g.h();
  auto f = [&](int ii) { return modes(static_cast<Eigen::Index>(g.index(ii, j)), col); };
  if (g.bc().periodic_x()) return (f((i + 1) % nx) - f((i - 1 + nx) % nx)) / (2.0 * h);
  if (nx < 3) return nx == 2 ? (f(1) - f(0)) / h : 0.0;
  if (i == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
  if (i == nx - 1) return (3.0 * f(nx - 1) - 4.0 * f(nx - 2) + f(nx - 3)) / (2.0 * h);
  return (f(i + 1) - f(i - 1)) / (2.0 * h);
}

double ddy(const Eigen::MatrixXd& modes, Eigen::Index col, const Grid& g, int i, int j) {
  const int ny = g.ny();
  const double h = g.h();
  auto f = [&](int jj) { return modes(static_cast<Eigen::Index>(g.index(i, jj)), col); };
  if (g.bc().periodic_y()) return (f((j + 1) % ny) - f((j - 1 + ny) % ny)) / (2.0 * h);
  if (ny < 3) return ny == 2 ? (f(1) - f(0)) / h : 0.0;
  if (j == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
  if (j == ny - 1) return (3.0 * f(ny - 1) - 4.0 * f(ny - 2) + f(ny - 3)) / (2.0 * h);
  return (f(j + 1) - f(j - 1)) / (2.0 * h);
}

}  // namespace

KineticScheme parse_kinetic_scheme(const std::string& name) {
  if (name == "stiffness") return KineticScheme::Stiffness;
  if (name == "gradient") return KineticScheme::Gradient;
  if (name == "analytic") return KineticScheme::Analytic;
  throw ConfigError("unknown kinetic scheme '" + name + "'");
}

ModeGradients finite_difference_gradients(const Eigen::MatrixXd& modes, const Grid& grid) {
  ModeGradients g{Eigen::MatrixXd(modes.rows(), modes.cols()),
                  Eigen::MatrixXd(modes.rows(), modes.cols())};
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < modes.cols(); ++c) {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const auto p = static_cast<Eigen::Index>(grid.index(i, j));
        g.dx(p, c) = ddx(modes, c, grid, i, j);
        g.dy(p, c) = ddy(modes, c, grid, i, j);
      }
  }
  return g;
}

Eigen::MatrixXd project_potential(const Eigen::MatrixXd& modes, const Grid& grid,
                                  const ScalarField& field) {
  const Eigen::VectorXd wu = grid.weights().cwiseProduct(field);
  return kernels::weighted_gram(modes, wu);
}

Eigen::MatrixXd boundary_matrix(const Eigen::MatrixXd& modes, const Grid& grid,
                                const MassField& mass) {
  const Eigen::VectorXd c = kinetic_coefficient(mass);
  const Eigen::Index m = modes.cols();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  const auto& bc = grid.bc();

  // Accumulates -ds c eta_i (d eta_j / dn) at one boundary point.
  auto add_point = [&](int i, int j, double ds, Boundary side_bc, double sign,
                       bool along_x) {
    const auto p = static_cast<Eigen::Index>(grid.index(i, j));
    Eigen::RowVectorXd dn(m);
    for (Eigen::Index col = 0; col < m; ++col) {
      // Zero flux: the mirrored ghost value makes the centred normal derivative vanish.
      if (side_bc == Boundary::NeumannZero) {
        dn[col] = 0.0;
      } else {
        dn[col] = sign * (along_x ? ddx(modes, col, grid, i, j) : ddy(modes, col, grid, i, j));
      }
    }
    b.noalias() -= (ds * c[p]) * modes.row(p).transpose() * dn;
  };

  // Left/right sides (normal -x / +x). A periodic seam is visited from both
  // sides at the same physical points; the two outward normals cancel.
  const int last_x = bc.periodic_x() ? 0 : grid.nx() - 1;
  for (int j = 0; j < grid.ny(); ++j) {
    const double ds = grid.axis_weight_y(j);
    add_point(0, j, ds, bc.left, -1.0, true);
    add_point(last_x, j, ds, bc.right, +1.0, true);
  }
  const int last_y = bc.periodic_y() ? 0 : grid.ny() - 1;
  for (int i = 0; i < grid.nx(); ++i) {
    const double ds = grid.axis_weight_x(i);
    add_point(i, 0, ds, bc.bottom, -1.0, false);
    add_point(i, last_y, ds, bc.top, +1.0, false);
  }
  return b;
}

ReducedModel assemble_reduced(const Eigen::MatrixXd& modes, const Grid& grid,
                              const MassField& mass, const PotentialAssembly& assembly,
                              KineticScheme scheme, const ModeGradients* gradients) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (modes.rows() != n || mass.size() != n || assembly.base.size() != n)
    throw ConfigError("basis, mass and potential must be sampled on the same grid");
  if (modes.cols() < 1) throw ConfigError("basis has no modes");

  ReducedModel model;
  double defect = 0.0;

  Eigen::MatrixXd t;
  switch (scheme) {
    case KineticScheme::Stiffness: {
      const DofMap dofs(grid);
      const auto k = assemble_stiffness(grid, dofs, mass);
      const Eigen::MatrixXd restricted = dofs.restrict_to_unknowns(modes);
      const Eigen::MatrixXd k_modes = k * restricted;
      t = restricted.transpose() * k_modes;
      break;
    }
    case KineticScheme::Gradient:
    case KineticScheme::Analytic: {
      ModeGradients fd;
      const ModeGradients* g = gradients;
      if (scheme == KineticScheme::Gradient) {
        fd = finite_difference_gradients(modes, grid);
        g = &fd;
      } else if (g == nullptr || g->dx.rows() != n || g->dx.cols() != modes.cols() ||
                 g->dy.rows() != n || g->dy.cols() != modes.cols()) {
        throw ConfigError("analytic kinetic scheme needs gradients matching the basis");
      }
      const Eigen::VectorXd wc = grid.weights().cwiseProduct(kinetic_coefficient(mass));
      t = kernels::weighted_gram(g->dx, wc) + kernels::weighted_gram(g->dy, wc);
      break;
    }
  }
  model.kinetic = symmetrized(t, defect);
  model.potential_base = symmetrized(project_potential(modes, grid, assembly.base), defect);
  for (const auto& term : assembly.terms) {
    if (term.shape.size() != n) throw ConfigError("potential term '" + term.name + "' off-grid");
    model.potential_terms.push_back(
        symmetrized(project_potential(modes, grid, term.shape), defect));
    model.term_names.push_back(term.name);
  }
  model.boundary = symmetrized(boundary_matrix(modes, grid, mass), defect);
  model.symmetrization_defect = defect;
  return model;
}

Eigen::MatrixXd evaluate_hamiltonian(const ReducedModel& model, const ScenarioParams& params,
                                     int modes) {
  if (modes < 1 || modes > model.max_modes()) {
    std::ostringstream os;
    os << "mode count " << modes << " outside 1.." << model.max_modes();
    throw std::out_of_range(os.str());
  }
  if (params.values.size() != model.potential_terms.size()) {
    std::ostringstream os;
    os << "expected " << model.potential_terms.size() << " parameters, got "
       << params.values.size();
    throw ConfigError(os.str());
  }
  const Eigen::Index m = modes;
  Eigen::MatrixXd h = model.kinetic.topLeftCorner(m, m) +
                      model.potential_base.topLeftCorner(m, m) +
                      model.boundary.topLeftCorner(m, m);
  for (std::size_t k = 0; k < params.values.size(); ++k)
    if (params.values[k] != 0.0)
      h += params.values[k] * model.potential_terms[k].topLeftCorner(m, m);
  return h;
}

ReducedSolution solve_reduced(const Eigen::MatrixXd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0)
    throw std::invalid_argument("reduced Hamiltonian must be square and non-empty");
  if (asymmetry(hamiltonian) > 1e-10)
    throw std::invalid_argument("reduced Hamiltonian is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
  if (es.info() != Eigen::Success) throw SolverError("reduced eigensolve failed");
  ReducedSolution sol;
  sol.energies = es.eigenvalues();
  sol.coeffs = es.eigenvectors();
  sol.modes = static_cast<int>(hamiltonian.rows());
  // Deterministic sign: largest-magnitude weight positive.
  for (Eigen::Index k = 0; k < sol.coeffs.cols(); ++k) {
    Eigen::Index arg = 0;
    sol.coeffs.col(k).cwiseAbs().maxCoeff(&arg);
    if (sol.coeffs(arg, k) < 0.0) sol.coeffs.col(k) *= -1.0;
  }
  return sol;
}

Eigen::VectorXd reconstruct(const Eigen::MatrixXd& modes, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() < 1 || coeffs.size() > modes.cols())
    throw std::invalid_argument("coefficient count exceeds basis size");
  return kernels::combine(modes.leftCols(coeffs.size()), coeffs);
}

Eigen::MatrixXd reconstruct_states(const Eigen::MatrixXd& modes, const ReducedSolution& sol,
                                   int n_states) {
  const int n = std::min(n_states, sol.modes);
  if (sol.modes > modes.cols()) throw std::invalid_argument("solution larger than basis");
  return kernels::combine(modes.leftCols(sol.modes), sol.coeffs.leftCols(n));
}

CoarseStates reconstruct_coarse(const Eigen::MatrixXd& modes, const Grid& grid,
                                const ReducedSolution& sol, int n_states, int stride) {
  if (stride < 1) throw std::invalid_argument("coarse stride must be >= 1");
  CoarseStates out;
  out.nx = (grid.nx() - 1) / stride + 1;
  out.ny = (grid.ny() - 1) / stride + 1;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(out.nx) * out.ny, sol.modes);
  Eigen::Index r = 0;
  for (int j = 0; j < grid.ny(); j += stride)
    for (int i = 0; i < grid.nx(); i += stride)
      sub.row(r++) = modes.row(static_cast<Eigen::Index>(grid.index(i, j))).head(sol.modes);
  const int n = std::min(n_states, sol.modes);
  out.states = kernels::combine(sub, sol.coeffs.leftCols(n));
  return out;
}

}  // namespace qrom
