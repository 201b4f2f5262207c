#include "qrom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qrom/kernels.hpp"
#include "qrom/pod.hpp"

namespace qrom {

namespace {

constexpr int kMaxExhaustiveCluster = 8;

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", 100.0 * fraction);
  return buf;
}

}  // namespace

std::vector<std::vector<int>> degenerate_clusters(const Eigen::VectorXd& energies, int count,
                                                  double cluster_gap) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < count; ++i) {
    if (i == 0 || energies[i] - energies[i - 1] >= cluster_gap)
      clusters.emplace_back();
    clusters.back().push_back(i);
  }
  return clusters;
}

StatePairing pair_states(const EigenSolution& dns, const Eigen::MatrixXd& rom_states,
                         const Eigen::VectorXd& weights, double cluster_gap) {
  const auto n = static_cast<int>(rom_states.cols());
  if (n == 0 || dns.states.cols() == 0) throw std::invalid_argument("pair_states: empty input");
  if (n > dns.states.cols())
    throw std::invalid_argument("pair_states: more ROM states than DNS states");

  const Eigen::MatrixXd overlap =
      kernels::weighted_cross(rom_states, dns.states.leftCols(n), weights).cwiseAbs();

  StatePairing pairing;
  pairing.clusters = degenerate_clusters(dns.energies, n, cluster_gap);
  pairing.dns_index.resize(n);
  pairing.overlap.resize(n);
  pairing.cluster.resize(n);

  for (std::size_t label = 0; label < pairing.clusters.size(); ++label) {
    const auto& members = pairing.clusters[label];
    std::vector<int> perm = members;
    std::vector<int> best = members;
    if (members.size() > 1 && members.size() <= kMaxExhaustiveCluster) {
      double best_score = -1.0;
      do {
        double score = 0.0;
        for (std::size_t a = 0; a < members.size(); ++a) score += overlap(members[a], perm[a]);
        if (score > best_score + 1e-15) {
          best_score = score;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else if (members.size() > 1) {
      // Greedy for unusually large clusters.
      std::vector<bool> used(members.size(), false);
      for (std::size_t a = 0; a < members.size(); ++a) {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t b = 0; b < members.size(); ++b)
          if (!used[b] && overlap(members[a], members[b]) > top) {
            top = overlap(members[a], members[b]);
            arg = b;
          }
        used[arg] = true;
        best[a] = members[arg];
      }
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
      const int r = members[a];
      pairing.dns_index[r] = best[a];
      pairing.overlap[r] = overlap(r, best[a]);
      pairing.cluster[r] = static_cast<int>(label);
    }
  }
  return pairing;
}

double ls_error(const Eigen::VectorXd& rom, const Eigen::VectorXd& dns,
                const Eigen::VectorXd& weights) {
  if (rom.size() != dns.size() || dns.size() != weights.size())
    throw std::invalid_argument("ls_error: grid mismatch");
  const double ref = norm(dns, weights);
  const double plus = norm(rom - dns, weights);
  const double minus = norm(rom + dns, weights);
  return std::min(plus, minus) / ref;
}

double subspace_error(const Eigen::VectorXd& rom, const Eigen::MatrixXd& cluster_states,
                      const Eigen::VectorXd& weights) {
  if (rom.size() != cluster_states.rows() || rom.size() != weights.size())
    throw std::invalid_argument("subspace_error: grid mismatch");
  const Eigen::VectorXd coeff =
      cluster_states.transpose() * weights.cwiseProduct(rom);
  const Eigen::VectorXd rest = rom - cluster_states * coeff;
  return norm(rest, weights) / norm(rom, weights);
}

const ErrorRow& ErrorTable::at_modes(int modes) const {
  for (const auto& row : rows)
    if (row.modes == modes) return row;
  throw std::out_of_range("error table has no row for M = " + std::to_string(modes));
}

ErrorTable error_sweep(const ReducedModel& model, const Eigen::MatrixXd& modes,
                       const std::optional<Eigen::VectorXd>& lambdas,
                       const ScenarioParams& params, const EigenSolution& dns,
                       const Grid& grid, const std::vector<int>& mode_counts,
                       const SweepOptions& options) {
  for (int m : mode_counts)
    if (m < 1 || m > model.max_modes() || m > modes.cols())
      throw std::out_of_range("sweep mode count " + std::to_string(m) + " outside basis");
  if (options.report_states > dns.energies.size())
    throw std::invalid_argument("DNS oracle has fewer states than requested for reporting");

  ErrorTable table;
  table.trained_states = options.trained_states;
  table.rows.resize(mode_counts.size());
  std::vector<std::exception_ptr> failures(mode_counts.size());
  const Eigen::VectorXd& w = grid.weights();

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < mode_counts.size(); ++r) {
    try {
      const int m = mode_counts[r];
      const auto sol = solve_reduced(evaluate_hamiltonian(model, params, m));
      const int n = std::min(options.report_states, m);
      const Eigen::MatrixXd psi = reconstruct_states(modes, sol, n);
      const auto pairing = pair_states(dns, psi, w, options.cluster_gap);

      ErrorRow row;
      row.modes = m;
      row.rom_energies.assign(sol.energies.data(), sol.energies.data() + n);
      for (int s = 0; s < n; ++s) {
        StateErrors e;
        const int d = pairing.dns_index[s];
        e.ls = ls_error(psi.col(s), dns.states.col(d), w);
        e.energy = std::abs(sol.energies[s] - dns.energies[d]) / std::abs(dns.energies[d]);
        const auto& members = pairing.clusters[pairing.cluster[s]];
        Eigen::MatrixXd span(dns.states.rows(), static_cast<Eigen::Index>(members.size()));
        for (std::size_t c = 0; c < members.size(); ++c)
          span.col(static_cast<Eigen::Index>(c)) = dns.states.col(members[c]);
        e.subspace = subspace_error(psi.col(s), span, w);
        e.ls_energy_order = ls_error(psi.col(s), dns.states.col(s), w);
        e.energy_energy_order =
            std::abs(sol.energies[s] - dns.energies[s]) / std::abs(dns.energies[s]);
        row.states.push_back(e);
      }
      if (n >= options.trained_states && options.trained_states > 0) {
        double sum = 0.0;
        for (int s = 0; s < options.trained_states; ++s) sum += row.states[s].ls;
        row.avg_trained = sum / options.trained_states;
      }
      if (lambdas && m <= lambdas->size()) row.theoretical = theoretical_ls_error(*lambdas, m);
      table.rows[r] = std::move(row);
    } catch (...) {
      failures[r] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return table;
}

void write_error_csv(std::ostream& out, const ErrorTable& table, bool energy_order) {
  out << "M,state,ls_error_pct,energy_error_pct,subspace_error_pct,avg_trained_pct,"
         "theoretical_pct\n";
  for (const auto& row : table.rows) {
    const std::string avg = row.avg_trained ? pct(*row.avg_trained) : "";
    const std::string theo = row.theoretical ? pct(*row.theoretical) : "";
    for (std::size_t s = 0; s < row.states.size(); ++s) {
      const auto& e = row.states[s];
      out << row.modes << ',' << (s + 1) << ','
          << pct(energy_order ? e.ls_energy_order : e.ls) << ','
          << pct(energy_order ? e.energy_energy_order : e.energy) << ','
          << pct(e.subspace) << ',' << avg << ',' << theo << '\n';
    }
  }
}

}  // namespace qrom
