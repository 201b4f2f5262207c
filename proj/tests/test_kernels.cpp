#include <doctest.h>

#include <cstring>

#include <omp.h>

#include "qrom/kernels.hpp"
#include "support.hpp"

using namespace qrom;

namespace {

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  Threads t(4);
  const Eigen::MatrixXd x = testing::random_matrix(5000, 17, 1);
  const Eigen::MatrixXd y = testing::random_matrix(5000, 9, 2);
  const Eigen::VectorXd w = testing::random_matrix(5000, 1, 3).col(0).cwiseAbs();
  const Eigen::MatrixXd c = testing::random_matrix(17, 6, 4);

  CHECK(rel_diff(kernels::omp::weighted_gram(x, w), kernels::serial::weighted_gram(x, w)) < 1e-12);
  CHECK(rel_diff(kernels::omp::weighted_cross(x, y, w), kernels::serial::weighted_cross(x, y, w)) < 1e-12);
  CHECK(rel_diff(kernels::omp::combine(x, c), kernels::serial::combine(x, c)) < 1e-12);

  // and with a plain expression
  CHECK(rel_diff(kernels::serial::weighted_gram(x, w), x.transpose() * w.asDiagonal() * x) < 1e-12);
  CHECK(rel_diff(kernels::serial::combine(x, c), x * c) < 1e-12);
}

TEST_CASE("parallel gram is symmetric and independent of the thread count") {
  const Eigen::MatrixXd x = testing::random_matrix(3001, 11, 5);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(3001, 0.01);
  Eigen::MatrixXd one, four;
  {
    Threads t(1);
    one = kernels::omp::weighted_gram(x, w);
  }
  {
    Threads t(4);
    four = kernels::omp::weighted_gram(x, w);
  }
  CHECK(std::memcmp(one.data(), four.data(), sizeof(double) * static_cast<std::size_t>(one.size())) == 0);
  CHECK((one - one.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shape checks and tiny inputs") {
  Threads t(3);
  const Eigen::MatrixXd x = testing::random_matrix(3, 2, 6);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
  CHECK(rel_diff(kernels::omp::weighted_gram(x, w), kernels::serial::weighted_gram(x, w)) < 1e-14);
  CHECK(rel_diff(kernels::omp::combine(x, Eigen::MatrixXd::Identity(2, 2)), x) == 0.0);
}
