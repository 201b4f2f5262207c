#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qrom/dns.hpp"
#include "qrom/domain.hpp"

namespace qrom {

struct TrainingPlan {
  std::vector<ScenarioParams> configs;
  int n_states = 1;
};

struct SnapshotMeta {
  int config = 0;
  int state = 0;      // 0-based quantum-state index
  double energy = 0;  // DNS eigenenergy, eV
};

/// Column-stacked unit-norm wavefunctions, N_r x N_s.
struct SnapshotSet {
  Eigen::MatrixXd columns;
  std::vector<SnapshotMeta> meta;

  Eigen::Index count() const { return columns.cols(); }
};

/// Orthonormal POD modes (weighted inner product) with descending lambdas.
/// `spectrum` keeps every Gram eigenvalue, including the truncated tail.
struct PodBasis {
  Eigen::MatrixXd modes;
  Eigen::VectorXd lambdas;
  Eigen::VectorXd spectrum;
  int snapshot_count = 0;

  Eigen::Index size() const { return modes.cols(); }
};

/// Runs DNS for every training configuration (in parallel) and stacks the
/// lowest n_states of each. SolverErrors are rethrown naming the config.
SnapshotSet collect_snapshots(const TrainingPlan& plan, const Grid& grid, const MassField& mass,
                              const PotentialAssembly& assembly,
                              const EigenOptions& options = {});

/// G_ij = (1/N_s) psi_i . psi_j under the grid quadrature.
Eigen::MatrixXd gram_matrix(const SnapshotSet& snapshots, const Eigen::VectorXd& weights);

/// Relative floor below which Gram eigenvalues are treated as round-off.
inline constexpr double kLambdaFloor = 1e-14;

/// Method of snapshots: eigenvectors of G combine snapshots into modes.
PodBasis compute_modes(const SnapshotSet& snapshots, const Eigen::MatrixXd& gram,
                       const Eigen::VectorXd& weights);

/// sqrt(sum_{i>M} lambda_i / sum_i lambda_i).
double theoretical_ls_error(const Eigen::VectorXd& lambdas, int modes);

}  // namespace qrom
