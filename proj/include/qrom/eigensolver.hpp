#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace qrom {

struct EigenOptions {
  double tol = 1e-9;            // absolute residual ||A x - l x|| for unit x
  int max_restarts = 400;
  int krylov_dim = 0;           // 0: chosen from k
  int guard_vectors = 3;        // extra Ritz pairs tracked beyond k
  int dense_cutoff = 256;       // use a dense solve at or below this size
  std::uint64_t seed = 0x5eed1234abcdULL;
};

struct EigenPairs {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // orthonormal columns (standard inner product)
  Eigen::VectorXd residuals;  // ||A x - l x||
  int operator_applications = 0;
};

/// The k algebraically smallest eigenpairs of a real symmetric sparse
/// matrix. Shift-invert Krylov-Schur about `shift`, which must lie below
/// the lowest eigenvalue (so A - shift I is positive definite).
/// Throws SolverError when the residual tolerance is not reached.
EigenPairs lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, int k, double shift,
                             const EigenOptions& options = {});

/// Full dense decomposition; the brute-force path for small problems.
EigenPairs dense_lowest_eigenpairs(const Eigen::MatrixXd& a, int k);

}  // namespace qrom
