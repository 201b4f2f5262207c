#pragma once

// Dense data-parallel kernels shared by POD, Galerkin assembly and
// reconstruction. Every kernel has a plain-loop serial reference (kept for
// tests and benchmarks) and an OpenMP variant used by the library.
//
// The parallel variants split the grid dimension into a fixed number of
// chunks independent of the thread count and reduce chunk partials in chunk
// order, so results are bitwise reproducible across thread counts.

#include <Eigen/Core>

namespace qrom::kernels {

namespace serial {

/// X^T diag(w) X.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w);
/// X^T diag(w) Y.
Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const Eigen::VectorXd& w);
/// X C.
Eigen::MatrixXd combine(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c);

}  // namespace serial

namespace omp {

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w);
Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const Eigen::VectorXd& w);
Eigen::MatrixXd combine(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c);

}  // namespace omp

using omp::combine;
using omp::weighted_cross;
using omp::weighted_gram;

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();
/// Applies QROM_NUM_THREADS from the environment, if set.
void configure_threads_from_env();

}  // namespace qrom::kernels
