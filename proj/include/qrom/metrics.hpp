#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "qrom/dns.hpp"
#include "qrom/domain.hpp"
#include "qrom/rom.hpp"

namespace qrom {

/// Consecutive DNS levels closer than this are treated as one cluster (eV).
inline constexpr double kDefaultClusterGap = 3e-3;

struct StatePairing {
  std::vector<int> dns_index;              // per ROM state
  std::vector<double> overlap;             // |<rom, dns>| per ROM state
  std::vector<int> cluster;                // cluster label per ROM state
  std::vector<std::vector<int>> clusters;  // DNS indices per label
};

/// Groups the first `count` DNS levels into near-degenerate clusters.
std::vector<std::vector<int>> degenerate_clusters(const Eigen::VectorXd& energies, int count,
                                                  double cluster_gap);

/// Energy-ordered pairing across clusters; inside a cluster the assignment
/// maximizing the summed |overlap| is chosen.
StatePairing pair_states(const EigenSolution& dns, const Eigen::MatrixXd& rom_states,
                         const Eigen::VectorXd& weights,
                         double cluster_gap = kDefaultClusterGap);

/// min over s in {+1,-1} of ||s rom - dns|| / ||dns|| (weighted L2).
double ls_error(const Eigen::VectorXd& rom, const Eigen::VectorXd& dns,
                const Eigen::VectorXd& weights);

/// ||(I - P) rom|| / ||rom|| with P the projector onto the orthonormal
/// columns of `cluster_states`.
double subspace_error(const Eigen::VectorXd& rom, const Eigen::MatrixXd& cluster_states,
                      const Eigen::VectorXd& weights);

struct StateErrors {
  double ls = 0.0;        // overlap-paired, fraction
  double energy = 0.0;    // overlap-paired, fraction
  double subspace = 0.0;  // fraction
  double ls_energy_order = 0.0;
  double energy_energy_order = 0.0;
};

struct ErrorRow {
  int modes = 0;
  std::vector<StateErrors> states;
  std::vector<double> rom_energies;
  std::optional<double> avg_trained;
  std::optional<double> theoretical;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  int trained_states = 0;

  const ErrorRow& at_modes(int modes) const;
};

struct SweepOptions {
  int report_states = 8;
  int trained_states = 6;
  double cluster_gap = kDefaultClusterGap;
};

/// Evaluates, solves and reconstructs the reduced model for each M and scores
/// the lowest states against the DNS oracle. `lambdas` (POD only) adds the
/// theoretical error column.
ErrorTable error_sweep(const ReducedModel& model, const Eigen::MatrixXd& modes,
                       const std::optional<Eigen::VectorXd>& lambdas,
                       const ScenarioParams& params, const EigenSolution& dns,
                       const Grid& grid, const std::vector<int>& mode_counts,
                       const SweepOptions& options = {});

/// `M,state,ls_error_pct,energy_error_pct,subspace_error_pct,avg_trained_pct,theoretical_pct`
/// with 3 significant digits; `energy_order` selects the plain energy-order
/// pairing for the per-state columns.
void write_error_csv(std::ostream& out, const ErrorTable& table, bool energy_order = false);

}  // namespace qrom
