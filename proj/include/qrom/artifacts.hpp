#pragma once

// On-disk artifacts.
//
// QWF1 (wavefunctions, POD/plane-wave bases): "QWF1", u32 nx, u32 ny,
// u32 nstates, then per state an f64 scalar (energy, lambda or |k|^2)
// followed by nx*ny f64 values, x fastest. All little-endian.
//
// PODH (reduced model): "PODH", u32 M_max, u32 n_terms, then f64 matrices
// T, U_base, U_terms[0..n_terms), B, each M_max x M_max row-major.
//
// Files are written to a sibling temporary and renamed into place.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qrom/dns.hpp"
#include "qrom/domain.hpp"
#include "qrom/rom.hpp"

namespace qrom::io {

struct WavefunctionDump {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  Eigen::VectorXd scalars;  // per state
  Eigen::MatrixXd states;   // (nx*ny) x nstates
};

/// Writes through a temporary sibling and renames over `path`.
void write_atomic(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

void write_qwf1(const std::filesystem::path& path, int nx, int ny,
                const Eigen::VectorXd& scalars, const Eigen::MatrixXd& states);
WavefunctionDump read_qwf1(const std::filesystem::path& path);

/// Term names are not part of the format; `term_names` is filled with
/// placeholders "term0", "term1", ... on load.
void write_podh(const std::filesystem::path& path, const ReducedModel& model);
ReducedModel read_podh(const std::filesystem::path& path);

// Plotting CSVs (header row, comma-separated).
void write_energies_csv(std::ostream& out, const Eigen::VectorXd& energies);
/// x, y, then one column per state.
void write_states_csv(std::ostream& out, const Grid& grid, const Eigen::MatrixXd& states);
void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& spectrum);
/// state, energy_ev, a1..aM
void write_coefficients_csv(std::ostream& out, const ReducedSolution& sol, int n_states);

/// Shortest round-trip text form of a double.
std::string format_double(double value);

}  // namespace qrom::io
