#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qrom/dns.hpp"
#include "qrom/errors.hpp"
#include "support.hpp"

using namespace qrom;

namespace {

EigenSolution solve_box(double l, double h, Boundary b, int k, double shift = 0.0) {
  const auto spec = testing::uniform_box(l, h, b);
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  return solve_lowest(assemble_hamiltonian(g, mass, base.array() + shift), k);
}

double max_orthonormality_defect(const EigenSolution& s, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd g = testing::weighted_overlap(s.states, s.states, w);
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

// Independent dense oracle: builds the same finite-volume operator as a
// dense matrix over all grid points from its definition and solves the
// generalized problem with Eigen's dense solver.
Eigen::VectorXd dense_reference(const StructureSpec& spec, const ScalarField& u, int k) {
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  const double kk = testing::kinetic_prefactor();
  const int nx = g.nx(), ny = g.ny();
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  auto c = [&](Eigen::Index p) { return kk / mass[p]; };
  auto face = [&](Eigen::Index p, Eigen::Index q, double len) {
    const double cf = 2.0 * c(p) * c(q) / (c(p) + c(q)) * len / g.h();
    a(p, p) += cf;
    a(q, q) += cf;
    a(p, q) -= cf;
    a(q, p) -= cf;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto p = static_cast<Eigen::Index>(g.index(i, j));
      if (i + 1 < nx) face(p, static_cast<Eigen::Index>(g.index(i + 1, j)), g.axis_weight_y(j));
      else if (g.bc().periodic_x()) face(p, static_cast<Eigen::Index>(g.index(0, j)), g.axis_weight_y(j));
      if (j + 1 < ny) face(p, static_cast<Eigen::Index>(g.index(i, j + 1)), g.axis_weight_x(i));
      else if (g.bc().periodic_y()) face(p, static_cast<Eigen::Index>(g.index(i, 0)), g.axis_weight_x(i));
    }
  std::vector<Eigen::Index> keep;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!g.is_dirichlet(i, j)) keep.push_back(static_cast<Eigen::Index>(g.index(i, j)));
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd ar(m, m), br = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index s = 0; s < m; ++s) ar(r, s) = a(keep[r], keep[s]);
    ar(r, r) += g.weights()[keep[r]] * u[keep[r]];
    br(r, r) = g.weights()[keep[r]];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ar, br, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(k);
}

}  // namespace

TEST_CASE("particle in a box matches the analytic spectrum") {
  const double l = 20.0;
  const auto sol = solve_box(l, 0.2, Boundary::DirichletZero, 4);
  const double exact[4] = {testing::box_energy(1, 1, 0.067, l), testing::box_energy(1, 2, 0.067, l),
                           testing::box_energy(2, 1, 0.067, l), testing::box_energy(2, 2, 0.067, l)};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(sol.energies[i] / exact[i] - 1.0) < 5e-3);
  CHECK(sol.energies[2] - sol.energies[1] < 1e-9);
}

TEST_CASE("box error is second order in h") {
  const double l = 10.0;
  const double exact = testing::box_energy(1, 1, 0.067, l);
  const double e1 = solve_box(l, 0.5, Boundary::DirichletZero, 1).energies[0] - exact;
  const double e2 = solve_box(l, 0.25, Boundary::DirichletZero, 1).energies[0] - exact;
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("constant potential shift moves every level by the shift") {
  const auto a = solve_box(6.0, 0.25, Boundary::DirichletZero, 5);
  const auto b = solve_box(6.0, 0.25, Boundary::DirichletZero, 5, 0.125);
  for (int i = 0; i < 5; ++i) CHECK(b.energies[i] - a.energies[i] == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("free particle on a torus") {
  const double l = 8.0;
  const auto spec = testing::uniform_box(l, 0.25, Boundary::Periodic);
  const auto g = build_grid(spec);
  const auto sol = solve_box(l, 0.25, Boundary::Periodic, 5);
  CHECK(std::abs(sol.energies[0]) < 1e-9);
  const Eigen::VectorXd& psi = sol.states.col(0);
  CHECK((psi.array() - psi.mean()).abs().maxCoeff() < 1e-6);
  // Four-fold first excited shell, discrete dispersion 2(1 - cos kh)/h^2
  const double kh = 2.0 * 3.14159265358979323846 / l * 0.25;
  const double e1 = testing::kinetic_prefactor() / 0.067 * 2.0 * (1.0 - std::cos(kh)) / (0.0625);
  for (int i = 1; i < 5; ++i) CHECK(sol.energies[i] == doctest::Approx(e1).epsilon(1e-8));
  (void)g;
}

TEST_CASE("Neumann box ground state is flat") {
  const auto sol = solve_box(5.0, 0.25, Boundary::NeumannZero, 3);
  CHECK(std::abs(sol.energies[0]) < 1e-9);
  // cos(pi x / L) mode at the discrete cosine frequency
  const double kh = 3.14159265358979323846 / 5.0 * 0.25;
  const double e1 = testing::kinetic_prefactor() / 0.067 * 2.0 * (1.0 - std::cos(kh)) / 0.0625;
  CHECK(sol.energies[1] == doctest::Approx(e1).epsilon(1e-8));
  CHECK(sol.energies[2] == doctest::Approx(e1).epsilon(1e-8));
}

TEST_CASE("Lanczos agrees with independent dense solves on small grids") {
  for (Boundary b : {Boundary::DirichletZero, Boundary::NeumannZero, Boundary::Periodic}) {
    CAPTURE(to_string(b));
    auto spec = testing::small_dots(b);
    const auto g = build_grid(spec);
    REQUIRE(g.nx() <= 20);
    const auto [mass, base] = sample_mass_and_base(spec, g);
    ScalarField u = base;
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        u[static_cast<Eigen::Index>(g.index(i, j))] += 0.01 * std::sin(0.7 * i + 0.3 * j);
    const auto h = assemble_hamiltonian(g, mass, u);
    EigenOptions iterative;
    iterative.dense_cutoff = 0;
    const auto lanczos = solve_lowest(h, 6, iterative);
    const auto dense = solve_lowest_dense(h, 6);
    const auto oracle = dense_reference(spec, u, 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(lanczos.energies[i] - oracle[i]) < 1e-9);
      CHECK(std::abs(dense.energies[i] - oracle[i]) < 1e-9);
    }
    CHECK(max_orthonormality_defect(lanczos, g.weights()) < 1e-8);
    CHECK(lanczos.residual_norms.maxCoeff() <= iterative.tol);
  }
}

TEST_CASE("3x3 Dirichlet grid has a single unknown") {
  const auto spec = testing::uniform_box(1.0, 0.5, Boundary::DirichletZero);
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  const auto h = assemble_hamiltonian(g, mass, base);
  REQUIRE(h.dofs.unknowns() == 1);
  const auto sol = solve_lowest(h, 1);
  // four faces of coefficient c, volume h^2: E = 4c/h^2
  CHECK(sol.energies[0] == doctest::Approx(4.0 * testing::kinetic_prefactor() / 0.067 / 0.25));
  CHECK(sol.states.col(0).cwiseAbs().maxCoeff() == doctest::Approx(2.0));
}

TEST_CASE("operator is symmetric and of 5-point sparsity") {
  auto spec = testing::small_dots(Boundary::NeumannZero);
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  const auto h = assemble_hamiltonian(g, mass, base);
  const Eigen::MatrixXd k = Eigen::MatrixXd(h.stiffness);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    CHECK((k.row(r).array() != 0.0).count() <= 5);
    CHECK(std::abs(k.row(r).sum()) < 1e-12);  // constants lie in the kernel
  }
  const Eigen::MatrixXd s = Eigen::MatrixXd(h.symmetric_matrix());
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * s.cwiseAbs().maxCoeff());
}

TEST_CASE("harmonic face averaging at a material step") {
  // Two points with different masses: the coupling is the harmonic mean.
  auto spec = testing::small_dots(Boundary::NeumannZero);
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  const auto h = assemble_hamiltonian(g, mass, base);
  const double kk = testing::kinetic_prefactor();
  int checked = 0;
  for (int j = 1; j + 1 < g.ny(); ++j)
    for (int i = 1; i + 1 < g.nx(); ++i) {
      const auto p = static_cast<Eigen::Index>(g.index(i, j));
      const auto q = static_cast<Eigen::Index>(g.index(i + 1, j));
      if (mass[p] == mass[q]) continue;
      const double cp = kk / mass[p], cq = kk / mass[q];
      const double expect = -2.0 * cp * cq / (cp + cq);  // face length h, spacing h
      CHECK(h.stiffness.coeff(h.dofs.unknown(p), h.dofs.unknown(q)) == doctest::Approx(expect));
      ++checked;
    }
  CHECK(checked > 0);
}

TEST_CASE("non-positive mass is rejected at assembly") {
  const auto spec = testing::uniform_box(2.0, 0.5, Boundary::DirichletZero);
  const auto g = build_grid(spec);
  auto [mass, base] = sample_mass_and_base(spec, g);
  mass[4] = 0.0;
  CHECK_THROWS_AS(assemble_hamiltonian(g, mass, base), ConfigError);
}

TEST_CASE("DofMap round trip") {
  const auto spec = testing::uniform_box(2.0, 0.25, Boundary::DirichletZero);
  const auto g = build_grid(spec);
  DofMap dofs(g);
  CHECK(dofs.unknowns() == 7 * 7);
  const Eigen::VectorXd r = testing::random_matrix(dofs.unknowns(), 1, 3).col(0);
  const Eigen::VectorXd full = dofs.prolong(r);
  CHECK(full.size() == static_cast<Eigen::Index>(g.size()));
  CHECK(full[0] == 0.0);
  CHECK((dofs.restrict_to_unknowns(full) - r).norm() == 0.0);
}

TEST_CASE("structure 1 at zero field: bound states and reflection symmetry") {
  StructureSpec s;
  s.lx = s.ly = 24.0;
  s.h = 0.1;
  s.layout = {4, 4, 4.0, 1.0, 2.5};
  s.barrier = {0.067, 0.544};
  s.well = {0.023, 0.0};
  const auto g = build_grid(s);
  const auto [mass, base] = sample_mass_and_base(s, g);
  const auto sol = solve_lowest(assemble_hamiltonian(g, mass, base), 6);
  for (int i = 0; i < 6; ++i) CHECK(sol.energies[i] < 0.544);
  CHECK(std::is_sorted(sol.energies.data(), sol.energies.data() + 6));
  CHECK(max_orthonormality_defect(sol, g.weights()) < 1e-8);

  const Eigen::VectorXd psi = sol.states.col(0);
  Eigen::VectorXd mirrored(psi.size());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      mirrored[static_cast<Eigen::Index>(g.index(i, j))] = psi[static_cast<Eigen::Index>(g.index(j, i))];
  const double sign = inner(psi, mirrored, g.weights()) < 0 ? -1.0 : 1.0;
  CHECK(norm(psi - sign * mirrored, g.weights()) < 1e-6);
}
