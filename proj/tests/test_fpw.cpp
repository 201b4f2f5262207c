#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "qrom/errors.hpp"
#include "qrom/fpw.hpp"
#include "support.hpp"

using namespace qrom;

namespace {

Grid torus(double l, double h) { return build_grid(testing::uniform_box(l, h, Boundary::Periodic)); }

}  // namespace

TEST_CASE("plane-wave ordering and shell counts") {
  const auto g = torus(4.0, 0.25);  // 16 x 16
  const auto waves = plane_wave_order(g, 25);
  CHECK(waves[0].kind == PlaneWaveKind::Constant);
  CHECK(waves[0].k2 == 0.0);
  // shell |n|^2 = 1: (0,1), (1,0), cos and sin each
  for (int i = 1; i <= 4; ++i) CHECK(waves[static_cast<std::size_t>(i)].k2 == doctest::Approx(std::pow(2 * std::numbers::pi / 4.0, 2)));
  CHECK(waves[1].nx == 0);
  CHECK(waves[1].ny == 1);
  CHECK(waves[1].kind == PlaneWaveKind::Cos);
  CHECK(waves[2].kind == PlaneWaveKind::Sin);
  CHECK(waves[3].nx == 1);
  // integer shell multiplicities on a square torus: 1, 4, 4, 4, 8, 4 (|n|^2 = 0,1,2,4,5,8)
  std::map<int, int> shells;
  for (const auto& w : plane_wave_order(g, 25)) shells[static_cast<int>(std::lround(w.k2 / std::pow(2 * std::numbers::pi / 4.0, 2)))]++;
  CHECK(shells[0] == 1);
  CHECK(shells[1] == 4);
  CHECK(shells[2] == 4);
  CHECK(shells[4] == 4);
  CHECK(shells[5] == 8);
  CHECK(shells[8] == 4);
  for (std::size_t i = 1; i < waves.size(); ++i) CHECK(waves[i].k2 >= waves[i - 1].k2 * (1 - 1e-12));
}

TEST_CASE("Nyquist wavevectors are excluded") {
  const auto g = torus(4.0, 0.25);
  // (nx - 1)/2 = 7 per axis: 1 + 2 * (8 * 15 - 8) - ... counted directly
  int expected = 1;
  for (int ny = -7; ny <= 7; ++ny)
    for (int nx = 0; nx <= 7; ++nx)
      if (!(nx == 0 && ny <= 0)) expected += 2;
  CHECK_NOTHROW(plane_wave_order(g, expected));
  CHECK_THROWS_AS(plane_wave_order(g, expected + 1), ConfigError);
}

TEST_CASE("plane waves are orthonormal on the grid") {
  const auto g = torus(4.0, 0.25);
  const auto b = generate_fpw_basis(g, 120);
  const Eigen::MatrixXd o = testing::weighted_overlap(b.modes, b.modes, g.weights());
  CHECK((o - Eigen::MatrixXd::Identity(120, 120)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(b.k_squared().size() == 120);
}

TEST_CASE("analytic gradients match the mode derivative") {
  const auto g = torus(4.0, 0.05);
  const auto b = generate_fpw_basis(g, 9);
  const double h = g.h();
  for (int m = 0; m < 9; ++m)
    for (int j = 3; j < g.ny(); j += 17)
      for (int i = 3; i + 1 < g.nx(); i += 13) {
        const auto p = static_cast<Eigen::Index>(g.index(i, j));
        const double fd = (b.modes(static_cast<Eigen::Index>(g.index(i + 1, j)), m) -
                           b.modes(static_cast<Eigen::Index>(g.index(i - 1, j)), m)) / (2 * h);
        CHECK(b.gradients.dx(p, m) == doctest::Approx(fd).epsilon(1e-2).scale(1.0));
      }
}

TEST_CASE("free-particle dispersion with the analytic scheme") {
  const auto spec = testing::uniform_box(5.0, 0.25, Boundary::Periodic);
  const auto g = build_grid(spec);
  const auto [mass, base] = sample_mass_and_base(spec, g);
  const auto b = generate_fpw_basis(g, 21);
  const auto model = assemble_reduced(b.modes, g, mass, PotentialAssembly{base, {}},
                                      KineticScheme::Analytic, &b.gradients);
  const auto sol = solve_reduced(evaluate_hamiltonian(model, {{}}, 21));
  for (int k = 0; k < 21; ++k)
    CHECK(sol.energies[k] ==
          doctest::Approx(testing::kinetic_prefactor() / 0.067 * b.waves[static_cast<std::size_t>(k)].k2)
              .epsilon(1e-10)
              .scale(1.0));
}

TEST_CASE("non-periodic grids are rejected") {
  const auto g = build_grid(testing::uniform_box(4.0, 0.25, Boundary::DirichletZero));
  CHECK_THROWS_AS(generate_fpw_basis(g, 5), ConfigError);
  const auto t = torus(4.0, 0.25);
  CHECK_THROWS_AS(generate_fpw_basis(t, 0), ConfigError);
}
