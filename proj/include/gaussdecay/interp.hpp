#pragma once

#include <vector>

#include "gaussdecay/grid.hpp"

namespace gd {

/// Rotation by `angle` in the (i, j) coordinate plane:
/// x_i' = cos*x_i - sin*x_j, x_j' = sin*x_i + cos*x_j.
struct PlaneRotation {
  int i = 0;
  int j = 1;
  double angle = 0.0;
};

Mat rotation_matrix(int dim, const std::vector<PlaneRotation>& planes);

/// v(x) = u(x + s), band-limited Fourier shift.
WaveField fourier_shift(const WaveField& u, const Point& s);

/// v(x) = u(R x) for R a product of planar rotations on disjoint axis pairs.
/// Each plane uses three Fourier shears, with an exact half-turn by index
/// reversal when |angle| > pi/2.
WaveField rotate(const WaveField& u, const std::vector<PlaneRotation>& planes);

/// v(x) = u(lambda x) by evaluating the trigonometric interpolant of u.
/// Nodes whose image leaves the box are set to zero.
WaveField dilate(const WaveField& u, double lambda);

/// v(x) = u(lambda R x + s).
WaveField resample_affine(const WaveField& u, double lambda, const std::vector<PlaneRotation>& planes,
                          const Point& s);

}  // namespace gd
