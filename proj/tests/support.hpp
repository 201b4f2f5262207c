#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "qrom/domain.hpp"

namespace testing {

// hbar^2 / (2 m0) in eV nm^2 from the exact SI definitions, kept separate
// from the library constant on purpose.
inline double kinetic_prefactor() {
  const double hbar = 1.054571817e-34;
  const double m0 = 9.1093837015e-31;
  const double ev = 1.602176634e-19;
  return hbar * hbar / (2.0 * m0) / ev * 1e18;
}

inline double box_energy(int nx, int ny, double mass, double l) {
  const double pi = 3.14159265358979323846;
  return kinetic_prefactor() * pi * pi * (nx * nx + ny * ny) / (mass * l * l);
}

inline qrom::StructureSpec uniform_box(double l, double h, qrom::Boundary b, double mass = 0.067) {
  qrom::StructureSpec s;
  s.lx = s.ly = l;
  s.h = h;
  s.barrier = {mass, 0.0};
  s.well = s.barrier;
  s.bc = qrom::BoundaryConditions::all(b);
  return s;
}

// Small two-material structure: 2x2 dots, 4 nm cell at h = 0.25.
inline qrom::StructureSpec small_dots(qrom::Boundary b) {
  qrom::StructureSpec s;
  s.lx = s.ly = 4.0;
  s.h = 0.25;
  s.layout = {2, 2, 1.5, 0.5, 0.25};
  s.barrier = {0.067, 0.544};
  s.well = {0.023, 0.0};
  s.bc = qrom::BoundaryConditions::all(b);
  return s;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(gen);
  return m;
}

// Weighted Gram matrix of columns, written out as plain loops.
inline Eigen::MatrixXd weighted_overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                        const Eigen::VectorXd& w) {
  Eigen::MatrixXd g(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index p = 0; p < a.rows(); ++p) s += w[p] * a(p, i) * b(p, j);
      g(i, j) = s;
    }
  return g;
}

}  // namespace testing
