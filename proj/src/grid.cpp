#include "gaussdecay/grid.hpp"

#include <string>

namespace gd {

GridSpec GridSpec::defaults(int dim) {
  if (dim == 1) return GridSpec{1, 20.0, 1024};
  if (dim == 2) return GridSpec{2, 12.0, 256};
  return GridSpec{dim, 8.0, 32};
}

void GridSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("grid dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                      std::to_string(dim));
  }
  if (points < 16 || points % 2 != 0) {
    throw DomainError("points per axis must be even and >= 16, got " + std::to_string(points));
  }
  if (!(half_width > 0.0)) throw DomainError("grid half width must be positive");
}

Eigen::Index GridSpec::size() const {
  Eigen::Index n = 1;
  for (int d = 0; d < dim; ++d) n *= points;
  return n;
}

Eigen::ArrayXd GridSpec::axis() const {
  return Eigen::ArrayXd::LinSpaced(points, 0, points - 1) * spacing() - half_width;
}

Eigen::ArrayXd GridSpec::wavenumbers() const {
  Eigen::ArrayXd k(points);
  const double dk = pi / half_width;
  for (int j = 0; j < points; ++j) k[j] = dk * (j < points / 2 ? j : j - points);
  return k;
}

Point GridSpec::point(Eigen::Index flat) const {
  Point x(dim);
  for (int d = dim - 1; d >= 0; --d) {
    x[d] = -half_width + spacing() * static_cast<double>(flat % points);
    flat /= points;
  }
  return x;
}

double WaveField::norm() const {
  return std::sqrt(values.abs2().sum() * grid.cell_volume());
}

double WaveField::boundary_ratio() const {
  const double pk = peak();
  if (pk == 0.0) return 0.0;
  double edge = 0.0;
  const int n = grid.points;
  Eigen::Index flat = 0;
  std::array<int, kMaxDim> idx{};
  const Eigen::Index total = grid.size();
  for (flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    bool on_edge = false;
    for (int d = grid.dim - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % n);
      rem /= n;
      if (idx[d] == 0 || idx[d] == n - 1) on_edge = true;
    }
    if (on_edge) edge = std::max(edge, std::abs(values[flat]));
  }
  return edge / pk;
}

Eigen::ArrayXd squared_radius(const GridSpec& grid) {
  Eigen::ArrayXd r2(grid.size());
  for_each_point(grid, [&](Eigen::Index i, const Point& x) { r2[i] = x.squaredNorm(); });
  return r2;
}

Eigen::ArrayXd coordinate(const GridSpec& grid, int d) {
  Eigen::ArrayXd c(grid.size());
  for_each_point(grid, [&](Eigen::Index i, const Point& x) { c[i] = x[d]; });
  return c;
}

cplx inner(const WaveField& a, const WaveField& b) {
  return (a.values.conjugate() * b.values).sum() * a.grid.cell_volume();
}

double distance(const WaveField& a, const WaveField& b) {
  return std::sqrt((a.values - b.values).abs2().sum() * a.grid.cell_volume());
}

double relative_distance(const WaveField& a, const WaveField& b) {
  return distance(a, b) / b.norm();
}

double max_abs_difference(const WaveField& a, const WaveField& b) {
  return (a.values - b.values).abs().maxCoeff();
}

}  // namespace gd
