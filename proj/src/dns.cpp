#include "qrom/dns.hpp"

#include <cmath>
#include <sstream>

#include "qrom/constants.hpp"
#include "qrom/errors.hpp"

namespace qrom {

DofMap::DofMap(const Grid& grid) : unknown_of_point_(grid.size(), -1), points_(grid.size()) {
  point_of_unknown_.reserve(grid.size());
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      if (grid.is_dirichlet(i, j)) continue;
      const std::size_t p = grid.index(i, j);
      unknown_of_point_[p] = static_cast<Eigen::Index>(point_of_unknown_.size());
      point_of_unknown_.push_back(p);
    }
}

Eigen::VectorXd DofMap::restrict_to_unknowns(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(unknowns());
  for (Eigen::Index u = 0; u < unknowns(); ++u)
    r[u] = full[static_cast<Eigen::Index>(point_of_unknown_[u])];
  return r;
}

Eigen::MatrixXd DofMap::restrict_to_unknowns(const Eigen::MatrixXd& full) const {
  Eigen::MatrixXd r(unknowns(), full.cols());
  for (Eigen::Index u = 0; u < unknowns(); ++u)
    r.row(u) = full.row(static_cast<Eigen::Index>(point_of_unknown_[u]));
  return r;
}

Eigen::VectorXd DofMap::prolong(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(points_));
  for (Eigen::Index u = 0; u < unknowns(); ++u)
    full[static_cast<Eigen::Index>(point_of_unknown_[u])] = reduced[u];
  return full;
}

Eigen::SparseMatrix<double> assemble_stiffness(const Grid& grid, const DofMap& dofs,
                                               const MassField& mass) {
  if (mass.size() != static_cast<Eigen::Index>(grid.size()))
    throw ConfigError("mass field does not match grid");
  if ((mass.array() <= 0.0).any()) throw ConfigError("effective mass must be positive");

  const Eigen::VectorXd c = units::kHbar2Over2m0 / mass.array();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dofs.unknowns()) * 5);

  // One face between points p and q with the given transverse face length.
  auto add_face = [&](std::size_t p, std::size_t q, double face_length) {
    const double cp = c[static_cast<Eigen::Index>(p)];
    const double cq = c[static_cast<Eigen::Index>(q)];
    const double coef = 2.0 * cp * cq / (cp + cq) * face_length / grid.h();
    const Eigen::Index up = dofs.unknown(p);
    const Eigen::Index uq = dofs.unknown(q);
    if (up >= 0) triplets.emplace_back(up, up, coef);
    if (uq >= 0) triplets.emplace_back(uq, uq, coef);
    if (up >= 0 && uq >= 0) {
      triplets.emplace_back(up, uq, -coef);
      triplets.emplace_back(uq, up, -coef);
    }
  };

  const int nx = grid.nx();
  const int ny = grid.ny();
  const int x_faces = grid.bc().periodic_x() ? (nx > 1 ? nx : 0) : nx - 1;
  const int y_faces = grid.bc().periodic_y() ? (ny > 1 ? ny : 0) : ny - 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < x_faces; ++i)
      add_face(grid.index(i, j), grid.index((i + 1) % nx, j), grid.axis_weight_y(j));
  for (int j = 0; j < y_faces; ++j)
    for (int i = 0; i < nx; ++i)
      add_face(grid.index(i, j), grid.index(i, (j + 1) % ny), grid.axis_weight_x(i));

  Eigen::SparseMatrix<double> k(dofs.unknowns(), dofs.unknowns());
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

DiscreteHamiltonian assemble_hamiltonian(const Grid& grid, const MassField& mass,
                                         const ScalarField& potential) {
  if (potential.size() != static_cast<Eigen::Index>(grid.size()))
    throw ConfigError("potential field does not match grid");
  DofMap dofs(grid);
  auto stiffness = assemble_stiffness(grid, dofs, mass);
  Eigen::VectorXd w = dofs.restrict_to_unknowns(grid.weights());
  Eigen::VectorXd u = dofs.restrict_to_unknowns(potential);
  return DiscreteHamiltonian{grid, std::move(dofs), std::move(stiffness), std::move(w),
                             std::move(u)};
}

Eigen::SparseMatrix<double> DiscreteHamiltonian::symmetric_matrix() const {
  const Eigen::VectorXd s = weights.array().rsqrt();
  Eigen::SparseMatrix<double> a = s.asDiagonal() * stiffness * s.asDiagonal();
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += potential[i];
  a.makeCompressed();
  return a;
}

Eigen::VectorXd DiscreteHamiltonian::apply(const Eigen::VectorXd& psi) const {
  const Eigen::VectorXd r = dofs.restrict_to_unknowns(psi);
  const Eigen::VectorXd hr =
      (stiffness * r).cwiseQuotient(weights) + potential.cwiseProduct(r);
  return dofs.prolong(hr);
}

namespace {

EigenSolution to_grid_solution(const DiscreteHamiltonian& h, const EigenPairs& pairs) {
  const Eigen::VectorXd s = h.weights.array().rsqrt();
  EigenSolution sol;
  sol.energies = pairs.values;
  sol.residual_norms = pairs.residuals;
  sol.states.resize(static_cast<Eigen::Index>(h.grid.size()), pairs.values.size());
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    Eigen::VectorXd reduced = s.cwiseProduct(pairs.vectors.col(k));
    sol.states.col(k) = h.dofs.prolong(reduced);
  }
  return sol;
}

}  // namespace

EigenSolution solve_lowest(const DiscreteHamiltonian& hamiltonian, int k,
                           const EigenOptions& options) {
  if (k < 1) throw SolverError("state count must be at least 1");
  // Below the potential minimum; the kinetic part is positive semidefinite.
  const double shift = hamiltonian.potential.minCoeff() - 0.01;
  const auto pairs = lowest_eigenpairs(hamiltonian.symmetric_matrix(), k, shift, options);
  return to_grid_solution(hamiltonian, pairs);
}

EigenSolution solve_lowest_dense(const DiscreteHamiltonian& hamiltonian, int k) {
  const Eigen::MatrixXd a(hamiltonian.symmetric_matrix());
  return to_grid_solution(hamiltonian, dense_lowest_eigenpairs(a, k));
}

}  // namespace qrom
