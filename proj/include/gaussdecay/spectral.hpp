#pragma once

#include <vector>

#include "gaussdecay/fft.hpp"
#include "gaussdecay/grid.hpp"

namespace gd {

/// Vector potential sampled on a grid: components, divergence and |A|^2.
struct MagneticSamples {
  std::vector<Eigen::ArrayXd> a;
  Eigen::ArrayXd div;
  Eigen::ArrayXd a2;
  double sup_norm = 0.0;

  bool empty() const { return a.empty(); }
};

/// Spectral Laplacian, exact for band-limited periodic fields.
WaveField laplacian(const WaveField& u);

/// Spectral gradient components. The Nyquist mode is dropped.
std::vector<Eigen::ArrayXcd> gradient(const WaveField& u);

/// Delta_A u = Delta u - i (div A) u - 2i A.grad u - |A|^2 u.
WaveField magnetic_laplacian(const WaveField& u, const MagneticSamples& a);

/// Planar angular momentum L = -i (x1 d2 - x2 d1) on axes (i, j).
WaveField angular_momentum(const WaveField& u, int i = 0, int j = 1);

}  // namespace gd
