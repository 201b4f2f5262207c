#pragma once

#include <vector>

#include <Eigen/Core>

#include "qrom/domain.hpp"
#include "qrom/rom.hpp"

namespace qrom {

enum class PlaneWaveKind { Constant, Cos, Sin };

struct WaveVector {
  int nx = 0;
  int ny = 0;
  PlaneWaveKind kind = PlaneWaveKind::Constant;
  double k2 = 0.0;  // |k|^2, nm^-2
};

/// Real Fourier basis {1, sqrt2 cos(k.r), sqrt2 sin(k.r)} on a doubly periodic
/// grid, ordered by |k|^2 then (nx, ny), cosine before sine.
struct PlaneWaveBasis {
  Eigen::MatrixXd modes;
  ModeGradients gradients;  // analytic derivatives, same normalization
  std::vector<WaveVector> waves;

  Eigen::Index size() const { return modes.cols(); }
  /// |k|^2 per mode (stored in the lambda slot of basis dumps).
  Eigen::VectorXd k_squared() const;
};

/// Ordered list of the first M plane waves for a grid; wavevectors are kept
/// strictly below the Nyquist index so the sampled set stays orthogonal.
std::vector<WaveVector> plane_wave_order(const Grid& grid, int count);

PlaneWaveBasis generate_fpw_basis(const Grid& grid, int count);

}  // namespace qrom
