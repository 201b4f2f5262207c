#include "qrom/fpw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "qrom/errors.hpp"

namespace qrom {

Eigen::VectorXd PlaneWaveBasis::k_squared() const {
  Eigen::VectorXd k2(static_cast<Eigen::Index>(waves.size()));
  for (std::size_t i = 0; i < waves.size(); ++i) k2[static_cast<Eigen::Index>(i)] = waves[i].k2;
  return k2;
}

std::vector<WaveVector> plane_wave_order(const Grid& grid, int count) {
  if (!grid.bc().periodic_x() || !grid.bc().periodic_y())
    throw ConfigError("plane-wave basis requires periodic boundaries on all sides");
  if (count < 1) throw ConfigError("plane-wave basis needs at least one mode");

  const double two_pi = 2.0 * std::numbers::pi;
  const double lx = grid.lx();
  const double ly = grid.ly();
  const int max_x = (grid.nx() - 1) / 2;
  const int max_y = (grid.ny() - 1) / 2;

  std::vector<WaveVector> waves;
  waves.push_back({0, 0, PlaneWaveKind::Constant, 0.0});
  // Half-plane representatives of each +/-k pair.
  for (int ny = -max_y; ny <= max_y; ++ny)
    for (int nx = 0; nx <= max_x; ++nx) {
      if (nx == 0 && ny <= 0) continue;
      const double kx = two_pi * nx / lx;
      const double ky = two_pi * ny / ly;
      const double k2 = kx * kx + ky * ky;
      waves.push_back({nx, ny, PlaneWaveKind::Cos, k2});
      waves.push_back({nx, ny, PlaneWaveKind::Sin, k2});
    }
  if (static_cast<std::size_t>(count) > waves.size()) {
    std::ostringstream os;
    os << "grid supports at most " << waves.size() << " plane waves, " << count << " requested";
    throw ConfigError(os.str());
  }
  // Shells are compared with a relative tolerance: e.g. (5,0) and (3,4) give
  // the same |k|^2 only up to rounding.
  std::stable_sort(waves.begin(), waves.end(), [](const WaveVector& a, const WaveVector& b) {
    if (std::abs(a.k2 - b.k2) > 1e-12 * std::max(a.k2, b.k2)) return a.k2 < b.k2;
    return std::make_tuple(a.nx, a.ny, static_cast<int>(a.kind)) <
           std::make_tuple(b.nx, b.ny, static_cast<int>(b.kind));
  });
  waves.resize(static_cast<std::size_t>(count));
  return waves;
}

PlaneWaveBasis generate_fpw_basis(const Grid& grid, int count) {
  PlaneWaveBasis basis;
  basis.waves = plane_wave_order(grid, count);
  const auto n = static_cast<Eigen::Index>(grid.size());
  basis.modes.resize(n, count);
  basis.gradients.dx.resize(n, count);
  basis.gradients.dy.resize(n, count);

  const double two_pi = 2.0 * std::numbers::pi;
#pragma omp parallel for schedule(static)
  for (int m = 0; m < count; ++m) {
    const auto& wv = basis.waves[static_cast<std::size_t>(m)];
    const double kx = two_pi * wv.nx / grid.lx();
    const double ky = two_pi * wv.ny / grid.ly();
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const auto p = static_cast<Eigen::Index>(grid.index(i, j));
        const double phase = kx * grid.x(i) + ky * grid.y(j);
        double f = 1.0, dfdphase = 0.0;
        if (wv.kind == PlaneWaveKind::Cos) {
          f = std::cos(phase);
          dfdphase = -std::sin(phase);
        } else if (wv.kind == PlaneWaveKind::Sin) {
          f = std::sin(phase);
          dfdphase = std::cos(phase);
        }
        basis.modes(p, m) = f;
        basis.gradients.dx(p, m) = kx * dfdphase;
        basis.gradients.dy(p, m) = ky * dfdphase;
      }
    const double scale = 1.0 / norm(basis.modes.col(m), grid.weights());
    basis.modes.col(m) *= scale;
    basis.gradients.dx.col(m) *= scale;
    basis.gradients.dy.col(m) *= scale;
  }
  return basis;
}

}  // namespace qrom
