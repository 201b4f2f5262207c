#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "qrom/domain.hpp"
#include "qrom/eigensolver.hpp"

namespace qrom {

/// Maps grid points to solver unknowns; points on DirichletZero sides are
/// eliminated (value fixed to zero).
class DofMap {
 public:
  explicit DofMap(const Grid& grid);

  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(point_of_unknown_.size()); }
  /// -1 for eliminated points.
  Eigen::Index unknown(std::size_t point) const { return unknown_of_point_[point]; }
  std::size_t point(Eigen::Index unknown) const { return point_of_unknown_[unknown]; }

  Eigen::VectorXd restrict_to_unknowns(const Eigen::VectorXd& full) const;
  Eigen::MatrixXd restrict_to_unknowns(const Eigen::MatrixXd& full) const;
  Eigen::VectorXd prolong(const Eigen::VectorXd& reduced) const;

 private:
  std::vector<Eigen::Index> unknown_of_point_;
  std::vector<std::size_t> point_of_unknown_;
  std::size_t points_;
};

/// Finite-volume discretization of -div(c grad psi) + U psi with
/// c = hbar^2 / (2 m0 m*). The stiffness matrix K approximates the energy
/// form integral(c |grad psi|^2) and is symmetric over the unknowns; the
/// eigenproblem is K psi + W U psi = E W psi with W the control volumes.
struct DiscreteHamiltonian {
  Grid grid;
  DofMap dofs;
  Eigen::SparseMatrix<double> stiffness;  // eV (for unit-normalized states)
  Eigen::VectorXd weights;                // control volumes over unknowns, nm^2
  Eigen::VectorXd potential;              // eV over unknowns

  /// W^{-1/2} (K + W U) W^{-1/2}: symmetric in the standard inner product.
  Eigen::SparseMatrix<double> symmetric_matrix() const;
  /// Grid-level action (H psi)_p for a full-grid function, zero on eliminated points.
  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;
};

/// Face-coupled stiffness only; shared by the DNS and the Galerkin kinetic matrix.
Eigen::SparseMatrix<double> assemble_stiffness(const Grid& grid, const DofMap& dofs,
                                               const MassField& mass);

DiscreteHamiltonian assemble_hamiltonian(const Grid& grid, const MassField& mass,
                                         const ScalarField& potential);

struct EigenSolution {
  Eigen::VectorXd energies;        // ascending, eV
  Eigen::MatrixXd states;          // grid.size() x k, unit weighted norm
  Eigen::VectorXd residual_norms;  // eV
};

EigenSolution solve_lowest(const DiscreteHamiltonian& hamiltonian, int k,
                           const EigenOptions& options = {});

/// Reference path: dense decomposition of the full symmetric matrix.
EigenSolution solve_lowest_dense(const DiscreteHamiltonian& hamiltonian, int k);

}  // namespace qrom
