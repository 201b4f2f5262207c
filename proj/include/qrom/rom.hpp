#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qrom/domain.hpp"

namespace qrom {

/// How the interior kinetic matrix T_ij = integral(c grad eta_i . grad eta_j)
/// is evaluated.
enum class KineticScheme {
  /// eta_i^T K eta_j with the DNS finite-volume stiffness. The reduced
  /// problem is then the exact Rayleigh-Ritz projection of the DNS operator.
  Stiffness,
  /// Pointwise quadrature of central-difference mode gradients
  /// (second-order one-sided at non-periodic edges).
  Gradient,
  /// Pointwise quadrature of caller-supplied analytic gradients.
  Analytic,
};

KineticScheme parse_kinetic_scheme(const std::string& name);

/// Grid-sampled x/y derivatives of each mode, same layout as the modes.
struct ModeGradients {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// Precomputed Galerkin matrices of the affine reduced Hamiltonian.
struct ReducedModel {
  Eigen::MatrixXd kinetic;
  Eigen::MatrixXd potential_base;
  std::vector<Eigen::MatrixXd> potential_terms;
  Eigen::MatrixXd boundary;
  std::vector<std::string> term_names;
  /// Largest relative asymmetry removed by the final (A + A^T)/2 step.
  double symmetrization_defect = 0.0;

  int max_modes() const { return static_cast<int>(kinetic.rows()); }
};

struct ReducedSolution {
  Eigen::VectorXd energies;  // ascending, eV
  Eigen::MatrixXd coeffs;    // M x M, column k holds the weights of state k
  int modes = 0;
};

/// Projects the Schrodinger operator onto orthonormal grid modes.
/// `gradients` is required for KineticScheme::Analytic and ignored otherwise.
ReducedModel assemble_reduced(const Eigen::MatrixXd& modes, const Grid& grid,
                              const MassField& mass, const PotentialAssembly& assembly,
                              KineticScheme scheme = KineticScheme::Stiffness,
                              const ModeGradients* gradients = nullptr);

/// U_ij = sum_p w_p eta_i U eta_j for one scalar field.
Eigen::MatrixXd project_potential(const Eigen::MatrixXd& modes, const Grid& grid,
                                  const ScalarField& field);

/// Central-difference gradients of every mode column.
ModeGradients finite_difference_gradients(const Eigen::MatrixXd& modes, const Grid& grid);

/// B_ij = -sum over non-periodic sides of eta_i c (grad eta_j . n) ds, plus the
/// two faces of each periodic seam.
Eigen::MatrixXd boundary_matrix(const Eigen::MatrixXd& modes, const Grid& grid,
                                const MassField& mass);

/// Leading M x M block of T + U_base + sum_k p_k U_k + B.
Eigen::MatrixXd evaluate_hamiltonian(const ReducedModel& model, const ScenarioParams& params,
                                     int modes);

/// Dense symmetric eigensolve; rejects asymmetric input.
ReducedSolution solve_reduced(const Eigen::MatrixXd& hamiltonian);

/// psi = sum_{j<M} a_j eta_j.
Eigen::VectorXd reconstruct(const Eigen::MatrixXd& modes, const Eigen::VectorXd& coeffs);
/// All states of a solution at once, N_r x n_states.
Eigen::MatrixXd reconstruct_states(const Eigen::MatrixXd& modes, const ReducedSolution& sol,
                                   int n_states);

struct CoarseStates {
  Eigen::MatrixXd states;  // coarse points x n_states, row-major x fastest
  int nx = 0;
  int ny = 0;
};

/// Reconstruction on every `stride`-th grid point along each axis.
CoarseStates reconstruct_coarse(const Eigen::MatrixXd& modes, const Grid& grid,
                                const ReducedSolution& sol, int n_states, int stride);

}  // namespace qrom
