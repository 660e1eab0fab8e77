#include "gaussdecay/spectral.hpp"

namespace gd {

WaveField laplacian(const WaveField& u) {
  const Fft fft(u.grid);
  WaveField out = u;
  fft.forward(out.values);
  out.values *= -squared_wavenumber(u.grid);
  fft.inverse(out.values);
  return out;
}

std::vector<Eigen::ArrayXcd> gradient(const WaveField& u) {
  const Fft fft(u.grid);
  Eigen::ArrayXcd hat = u.values;
  fft.forward(hat);
  const double nyquist = u.grid.max_wavenumber();
  std::vector<Eigen::ArrayXcd> out;
  out.reserve(u.grid.dim);
  for (int d = 0; d < u.grid.dim; ++d) {
    Eigen::ArrayXd k = wavenumber_component(u.grid, d);
    k = (k.abs() >= nyquist - 1e-12 * nyquist).select(0.0, k);
    Eigen::ArrayXcd g = hat * (I * k);
    fft.inverse(g);
    out.push_back(std::move(g));
  }
  return out;
}

WaveField magnetic_laplacian(const WaveField& u, const MagneticSamples& a) {
  WaveField out = laplacian(u);
  if (a.empty()) return out;
  const auto grad = gradient(u);
  Eigen::ArrayXcd drift = Eigen::ArrayXcd::Zero(u.values.size());
  for (int d = 0; d < u.grid.dim; ++d) drift += a.a[d] * grad[d];
  out.values += -I * a.div * u.values - 2.0 * I * drift - a.a2 * u.values;
  return out;
}

WaveField angular_momentum(const WaveField& u, int i, int j) {
  if (u.grid.dim < 2) throw DomainError("angular momentum needs at least two dimensions");
  const auto grad = gradient(u);
  const Eigen::ArrayXd xi = coordinate(u.grid, i);
  const Eigen::ArrayXd xj = coordinate(u.grid, j);
  WaveField out = u;
  out.values = -I * (xi * grad[j] - xj * grad[i]);
  return out;
}

}  // namespace gd
