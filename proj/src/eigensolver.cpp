#include "qrom/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "qrom/errors.hpp"

namespace qrom {

namespace {

Eigen::VectorXd residual_norms(const Eigen::SparseMatrix<double>& a,
                               const Eigen::MatrixXd& x, const Eigen::VectorXd& lambda) {
  Eigen::VectorXd r(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    r[i] = (a * x.col(i) - lambda[i] * x.col(i)).norm();
  return r;
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& v, Eigen::Index cols, Eigen::VectorXd& w) {
  const auto basis = v.leftCols(cols);
  Eigen::VectorXd h = basis.transpose() * w;
  w.noalias() -= basis * h;
  const Eigen::VectorXd h2 = basis.transpose() * w;
  w.noalias() -= basis * h2;
  return h + h2;
}

}  // namespace

EigenPairs dense_lowest_eigenpairs(const Eigen::MatrixXd& a, int k) {
  if (k < 1 || k > a.rows()) throw SolverError("requested eigenpair count out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw SolverError("dense eigendecomposition failed");
  EigenPairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i)
    out.residuals[i] = (a * out.vectors.col(i) - out.values[i] * out.vectors.col(i)).norm();
  return out;
}

EigenPairs lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, int k, double shift,
                             const EigenOptions& options) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw SolverError("matrix must be square");
  if (k < 1 || k > n) throw SolverError("requested eigenpair count out of range");

  if (n <= options.dense_cutoff) {
    EigenPairs out = dense_lowest_eigenpairs(Eigen::MatrixXd(a), k);
    out.operator_applications = 0;
    return out;
  }

  Eigen::SparseMatrix<double> shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>> factor(shifted);
  if (factor.info() != Eigen::Success) throw SolverError("shifted factorization failed");
  if ((factor.vectorD().array() <= 0.0).any())
    throw SolverError("shift is not below the spectrum (A - shift I indefinite)");

  const Eigen::Index nev = std::min<Eigen::Index>(k + options.guard_vectors, n - 1);
  Eigen::Index m = options.krylov_dim > 0 ? options.krylov_dim
                                          : std::max<Eigen::Index>(2 * nev + 20, 48);
  m = std::clamp<Eigen::Index>(m, nev + 2, n - 1);
  const Eigen::Index keep = std::min<Eigen::Index>(nev + (m - nev) / 2, m - 1);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  };

  Eigen::MatrixXd v(n, m + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  v.col(0) = random_vector().normalized();

  EigenPairs out;
  Eigen::Index start = 0;
  double worst = 0.0;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    for (Eigen::Index j = start; j < m; ++j) {
      Eigen::VectorXd w = factor.solve(v.col(j));
      ++out.operator_applications;
      h.col(j).head(j + 1) = orthogonalize(v, j + 1, w);
      double beta = w.norm();
      if (beta < 1e-14 * std::abs(h(j, j))) {
        // Invariant subspace: continue with a fresh orthogonal direction.
        w = random_vector();
        orthogonalize(v, j + 1, w);
        beta = 0.0;
        v.col(j + 1) = w.normalized();
      } else {
        v.col(j + 1) = w / beta;
      }
      h(j + 1, j) = beta;
    }

    Eigen::MatrixXd s = h.topLeftCorner(m, m);
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    // Largest theta of the inverted operator = lowest eigenvalues of A.
    const Eigen::MatrixXd y = es.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd theta = es.eigenvalues().reverse();
    const double beta_m = h(m, m - 1);

    const Eigen::MatrixXd x = v.leftCols(m) * y.leftCols(k);
    Eigen::VectorXd lambda(k);
    for (int i = 0; i < k; ++i) lambda[i] = x.col(i).dot(a * x.col(i));
    const Eigen::VectorXd res = residual_norms(a, x, lambda);
    worst = res.maxCoeff();
    if (worst <= options.tol) {
      std::vector<int> order(k);
      for (int i = 0; i < k; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](int p, int q) { return lambda[p] < lambda[q]; });
      out.values.resize(k);
      out.vectors.resize(n, k);
      out.residuals.resize(k);
      for (int i = 0; i < k; ++i) {
        out.values[i] = lambda[order[i]];
        out.vectors.col(i) = x.col(order[i]);
        out.residuals[i] = res[order[i]];
      }
      return out;
    }

    // Thick restart: keep the leading Ritz vectors plus the residual direction.
    const Eigen::MatrixXd kept = v.leftCols(m) * y.leftCols(keep);
    const Eigen::VectorXd next = v.col(m);
    v.leftCols(keep) = kept;
    v.col(keep) = next;
    h.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) {
      h(i, i) = theta[i];
      h(keep, i) = beta_m * y(m - 1, i);
    }
    start = keep;
  }
  std::ostringstream os;
  os << "Krylov-Schur did not converge: worst residual " << worst << " > tol " << options.tol;
  throw SolverError(os.str(), worst);
}

}  // namespace qrom
