#include "qrom/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qrom::kernels {

namespace {

constexpr Eigen::Index kChunks = 64;

Eigen::Index chunk_begin(Eigen::Index n, Eigen::Index c) { return n * c / kChunks; }

void check_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  if (x.rows() != w.size()) throw std::invalid_argument("kernel: weight/row size mismatch");
}

}  // namespace

namespace serial {

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  check_rows(x, w);
  const Eigen::Index n = x.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      double s = 0.0;
      for (Eigen::Index p = 0; p < x.rows(); ++p) s += w[p] * x(p, a) * x(p, b);
      g(a, b) = s;
      g(b, a) = s;
    }
  }
  return g;
}

Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const Eigen::VectorXd& w) {
  check_rows(x, w);
  if (y.rows() != x.rows()) throw std::invalid_argument("kernel: row size mismatch");
  Eigen::MatrixXd g(x.cols(), y.cols());
  for (Eigen::Index a = 0; a < x.cols(); ++a) {
    for (Eigen::Index b = 0; b < y.cols(); ++b) {
      double s = 0.0;
      for (Eigen::Index p = 0; p < x.rows(); ++p) s += w[p] * x(p, a) * y(p, b);
      g(a, b) = s;
    }
  }
  return g;
}

Eigen::MatrixXd combine(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  if (x.cols() != c.rows()) throw std::invalid_argument("kernel: combine size mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), c.cols());
  for (Eigen::Index k = 0; k < c.cols(); ++k)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double cj = c(j, k);
      for (Eigen::Index p = 0; p < x.rows(); ++p) out(p, k) += cj * x(p, j);
    }
  return out;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const Eigen::VectorXd& w) {
  check_rows(x, w);
  if (y.rows() != x.rows()) throw std::invalid_argument("kernel: row size mismatch");
  const Eigen::Index n = x.rows();
  std::vector<Eigen::MatrixXd> partial(kChunks);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < kChunks; ++c) {
    const Eigen::Index b = chunk_begin(n, c);
    const Eigen::Index len = chunk_begin(n, c + 1) - b;
    partial[c] = x.middleRows(b, len).transpose() *
                 (w.segment(b, len).asDiagonal() * y.middleRows(b, len));
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.cols(), y.cols());
  for (const auto& part : partial) g += part;
  return g;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  Eigen::MatrixXd g = weighted_cross(x, x, w);
  // Exact symmetry regardless of GEMM blocking.
  const Eigen::MatrixXd gt = g.transpose();
  return 0.5 * (g + gt);
}

Eigen::MatrixXd combine(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  if (x.cols() != c.rows()) throw std::invalid_argument("kernel: combine size mismatch");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd out(n, c.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < kChunks; ++k) {
    const Eigen::Index b = chunk_begin(n, k);
    const Eigen::Index len = chunk_begin(n, k + 1) - b;
    out.middleRows(b, len).noalias() = x.middleRows(b, len) * c;
  }
  return out;
}

}  // namespace omp

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void configure_threads_from_env() {
  const char* env = std::getenv("QROM_NUM_THREADS");
  if (env == nullptr || *env == '\0') return;
  const int n = std::max(1, std::atoi(env));
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace qrom::kernels
