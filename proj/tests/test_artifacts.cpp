#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qrom/artifacts.hpp"
#include "qrom/errors.hpp"
#include "support.hpp"

using namespace qrom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("qrom_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("QWF1 round trip is bit exact") {
  TempDir tmp;
  const int nx = 7, ny = 5;
  Eigen::MatrixXd states = testing::random_matrix(nx * ny, 3, 11);
  states(4, 1) = 1e-310;  // subnormal survives
  Eigen::VectorXd e(3);
  e << 0.192561234567891, -0.0, 1.0 / 3.0;
  io::write_qwf1(tmp.path / "a.qwf", nx, ny, e, states);
  const auto d = io::read_qwf1(tmp.path / "a.qwf");
  CHECK(d.nx == 7u);
  CHECK(d.ny == 5u);
  CHECK(bit_equal(d.states, states));
  CHECK(bit_equal(d.scalars, e));
  CHECK(fs::file_size(tmp.path / "a.qwf") == 16u + 3u * 8u * (1u + 35u));
  CHECK_FALSE(fs::exists(tmp.path / "a.qwf.tmp"));

  SUBCASE("layout: magic, little-endian header, energy then x-fastest values") {
    const std::string raw = slurp(tmp.path / "a.qwf");
    CHECK(raw.substr(0, 4) == "QWF1");
    CHECK(static_cast<unsigned char>(raw[4]) == 7);
    CHECK(static_cast<unsigned char>(raw[8]) == 5);
    CHECK(static_cast<unsigned char>(raw[12]) == 3);
    double v;
    std::memcpy(&v, raw.data() + 16, 8);
    CHECK(v == e[0]);
    std::memcpy(&v, raw.data() + 24 + 8, 8);
    CHECK(v == states(1, 0));
  }
}

TEST_CASE("QWF1 errors") {
  TempDir tmp;
  CHECK_THROWS_AS(io::read_qwf1(tmp.path / "missing.qwf"), IoError);
  {
    std::ofstream out(tmp.path / "bad.qwf", std::ios::binary);
    out << "PODH0000000000000000";
  }
  CHECK_THROWS_AS(io::read_qwf1(tmp.path / "bad.qwf"), IoError);
  Eigen::MatrixXd s = testing::random_matrix(6, 2, 1);
  io::write_qwf1(tmp.path / "t.qwf", 3, 2, Eigen::VectorXd::Zero(2), s);
  fs::resize_file(tmp.path / "t.qwf", fs::file_size(tmp.path / "t.qwf") - 4);
  CHECK_THROWS_AS(io::read_qwf1(tmp.path / "t.qwf"), IoError);
  CHECK_THROWS_AS(io::write_qwf1(tmp.path / "x.qwf", 4, 2, Eigen::VectorXd::Zero(2), s), IoError);
}

TEST_CASE("PODH round trip is bit exact") {
  TempDir tmp;
  ReducedModel m;
  m.kinetic = testing::random_matrix(6, 6, 1);
  m.potential_base = testing::random_matrix(6, 6, 2);
  m.potential_terms = {testing::random_matrix(6, 6, 3), testing::random_matrix(6, 6, 4)};
  m.boundary = testing::random_matrix(6, 6, 5);
  io::write_podh(tmp.path / "m.podh", m);
  const auto r = io::read_podh(tmp.path / "m.podh");
  CHECK(bit_equal(r.kinetic, m.kinetic));
  CHECK(bit_equal(r.potential_base, m.potential_base));
  REQUIRE(r.potential_terms.size() == 2);
  CHECK(bit_equal(r.potential_terms[1], m.potential_terms[1]));
  CHECK(bit_equal(r.boundary, m.boundary));
  CHECK(r.term_names.size() == 2);
  CHECK(fs::file_size(tmp.path / "m.podh") == 12u + 5u * 36u * 8u);

  // row-major: second stored value is T(0,1)
  const std::string raw = slurp(tmp.path / "m.podh");
  CHECK(raw.substr(0, 4) == "PODH");
  double v;
  std::memcpy(&v, raw.data() + 12 + 8, 8);
  CHECK(v == m.kinetic(0, 1));
  CHECK_THROWS_AS(io::read_podh(tmp.path / "nothing.podh"), IoError);
}

TEST_CASE("CSV writers") {
  Eigen::VectorXd e(2);
  e << 0.1, 0.25;
  std::ostringstream os;
  io::write_energies_csv(os, e);
  CHECK(os.str() == "state,energy_ev\n1,0.1\n2,0.25\n");

  std::ostringstream sp;
  Eigen::VectorXd l(2);
  l << 0.5, 0.25;
  io::write_spectrum_csv(sp, l);
  CHECK(sp.str() == "mode,lambda,lambda_over_lambda1\n1,0.5,1\n2,0.25,0.5\n");

  const Grid g(2, 2, 0.5, BoundaryConditions::all(Boundary::NeumannZero));
  std::ostringstream st;
  io::write_states_csv(st, g, Eigen::MatrixXd::Constant(4, 1, 2.0));
  CHECK(st.str() == "x_nm,y_nm,psi1\n0,0,2\n0.5,0,2\n0,0.5,2\n0.5,0.5,2\n");

  ReducedSolution sol{e, Eigen::Matrix2d::Identity(), 2};
  std::ostringstream co;
  io::write_coefficients_csv(co, sol, 1);
  CHECK(co.str() == "state,energy_ev,a1,a2\n1,0.1,1,0\n");

  CHECK(io::format_double(0.1) == "0.1");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
