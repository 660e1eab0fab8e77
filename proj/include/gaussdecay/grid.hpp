#pragma once

#include <array>
#include <cmath>

#include "gaussdecay/core.hpp"

namespace gd {

/// Uniform periodic grid on the box [-L, L)^n with N points per axis.
/// Flat storage is row-major: the first axis varies slowest.
struct GridSpec {
  int dim = 1;
  double half_width = 20.0;
  int points = 1024;

  /// Desk-scale defaults: n=1 -> L=20, N=1024; n=2 -> L=12, N=256.
  static GridSpec defaults(int dim);

  void validate() const;

  double spacing() const { return 2.0 * half_width / points; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  Eigen::Index size() const;

  /// Coordinates along one axis, x_j = -L + j*dx.
  Eigen::ArrayXd axis() const;
  /// Angular wavenumbers in FFT order, k_j = j*pi/L with j wrapped to [-N/2, N/2).
  Eigen::ArrayXd wavenumbers() const;
  double max_wavenumber() const { return pi / spacing(); }

  Point point(Eigen::Index flat) const;

  bool operator==(const GridSpec&) const = default;
};

/// Calls fn(flat_index, point) for every grid node, in storage order.
template <typename Fn>
void for_each_point(const GridSpec& grid, Fn&& fn) {
  const Eigen::ArrayXd ax = grid.axis();
  std::array<int, kMaxDim> idx{};
  Point x(grid.dim);
  for (int d = 0; d < grid.dim; ++d) x[d] = ax[0];
  const Eigen::Index total = grid.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    fn(flat, x);
    for (int d = grid.dim - 1; d >= 0; --d) {
      if (++idx[d] < grid.points) {
        x[d] = ax[idx[d]];
        break;
      }
      idx[d] = 0;
      x[d] = ax[0];
    }
  }
}

/// A complex field snapshot on a grid at a time instant.
struct WaveField {
  GridSpec grid;
  Eigen::ArrayXcd values;
  double time = 0.0;

  WaveField() = default;
  WaveField(GridSpec g, double t = 0.0)
      : grid(g), values(Eigen::ArrayXcd::Zero(g.size())), time(t) {}
  WaveField(GridSpec g, Eigen::ArrayXcd v, double t) : grid(g), values(std::move(v)), time(t) {}

  double norm() const;
  double peak() const { return values.abs().maxCoeff(); }
  /// Largest magnitude on the outermost layer of the box, relative to the peak.
  double boundary_ratio() const;
  bool all_finite() const { return values.allFinite(); }
};

template <typename Fn>
WaveField sample(const GridSpec& grid, Fn&& fn, double time = 0.0) {
  WaveField f(grid, time);
  for_each_point(grid, [&](Eigen::Index i, const Point& x) { f.values[i] = fn(x); });
  return f;
}

/// |x|^2 at every node.
Eigen::ArrayXd squared_radius(const GridSpec& grid);

/// One coordinate component x_d at every node.
Eigen::ArrayXd coordinate(const GridSpec& grid, int d);

cplx inner(const WaveField& a, const WaveField& b);
double distance(const WaveField& a, const WaveField& b);
double relative_distance(const WaveField& a, const WaveField& b);
double max_abs_difference(const WaveField& a, const WaveField& b);

}  // namespace gd
