#include "qrom/pod.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qrom/errors.hpp"
#include "qrom/kernels.hpp"

namespace qrom {

SnapshotSet collect_snapshots(const TrainingPlan& plan, const Grid& grid, const MassField& mass,
                              const PotentialAssembly& assembly, const EigenOptions& options) {
  if (plan.configs.empty()) throw ConfigError("training plan has no configurations");
  if (plan.n_states < 1) throw ConfigError("training plan needs at least one state");

  const auto n_configs = static_cast<int>(plan.configs.size());
  const int k = plan.n_states;
  SnapshotSet set;
  set.columns.resize(static_cast<Eigen::Index>(grid.size()), n_configs * k);
  set.meta.resize(static_cast<std::size_t>(n_configs) * k);
  std::vector<std::exception_ptr> failures(n_configs);

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < n_configs; ++c) {
    try {
      const auto u = assemble_potential(assembly, plan.configs[c]);
      const auto sol = solve_lowest(assemble_hamiltonian(grid, mass, u), k, options);
      for (int s = 0; s < k; ++s) {
        set.columns.col(c * k + s) = sol.states.col(s);
        set.meta[static_cast<std::size_t>(c * k + s)] = {c, s, sol.energies[s]};
      }
    } catch (...) {
      failures[c] = std::current_exception();
    }
  }
  for (int c = 0; c < n_configs; ++c) {
    if (!failures[c]) continue;
    try {
      std::rethrow_exception(failures[c]);
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << "training config " << c << ": " << e.what();
      throw SolverError(os.str(), e.residual());
    } catch (const ConfigError& e) {
      throw ConfigError("training config " + std::to_string(c) + ": " + e.what());
    }
  }
  return set;
}

Eigen::MatrixXd gram_matrix(const SnapshotSet& snapshots, const Eigen::VectorXd& weights) {
  if (snapshots.count() == 0) throw ConfigError("empty snapshot set");
  return kernels::weighted_gram(snapshots.columns, weights) /
         static_cast<double>(snapshots.count());
}

PodBasis compute_modes(const SnapshotSet& snapshots, const Eigen::MatrixXd& gram,
                       const Eigen::VectorXd& weights) {
  const Eigen::Index ns = snapshots.count();
  if (ns == 0 || gram.rows() != ns || gram.cols() != ns)
    throw ConfigError("Gram matrix does not match snapshot set");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw SolverError("Gram eigendecomposition failed");
  const Eigen::VectorXd lambda = es.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
  if (!(lambda[0] > 0.0)) throw ConfigError("snapshot set is identically zero");

  Eigen::Index kept = 0;
  while (kept < ns && lambda[kept] / lambda[0] >= kLambdaFloor) ++kept;

  PodBasis basis;
  basis.spectrum = lambda;
  basis.lambdas = lambda.head(kept);
  basis.snapshot_count = static_cast<int>(ns);
  basis.modes = kernels::combine(snapshots.columns, vecs.leftCols(kept));

  // Normalize, then one weighted Gram-Schmidt sweep in descending-lambda
  // order to remove round-off in the weakest modes.
  for (Eigen::Index j = 0; j < kept; ++j) {
    auto mode = basis.modes.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double proj = (basis.modes.col(i).array() * mode.array() * weights.array()).sum();
        mode -= proj * basis.modes.col(i);
      }
      mode /= std::sqrt((mode.array().square() * weights.array()).sum());
    }
  }
  return basis;
}

double theoretical_ls_error(const Eigen::VectorXd& lambdas, int modes) {
  if (modes < 1 || modes > lambdas.size())
    throw std::out_of_range("mode count outside 1..len(lambdas)");
  const double total = lambdas.sum();
  const double tail = lambdas.tail(lambdas.size() - modes).sum();
  return std::sqrt(std::max(0.0, tail) / total);
}

}  // namespace qrom
