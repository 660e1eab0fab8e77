#include "gaussdecay/specfun.hpp"

#include <cstdio>
#include <cstdlib>

namespace gd {

OscillatorSpectrumEntry oscillator_entry(int m, double omega) {
  if (m < 0) throw DomainError("oscillator index must be non-negative");
  if (!(omega > 0.0)) throw DomainError("oscillator frequency must be positive");
  return {m, omega, omega * (m + 0.5)};
}

LandauSpectrumEntry landau_entry(int m, int l, double b) {
  if (m < 0) throw DomainError("Landau index m must be non-negative");
  if (b == 0.0 || !std::isfinite(b)) throw DomainError("Landau field strength must be nonzero");
  const int sgn = b > 0 ? 1 : -1;
  const int level = m + (std::abs(l) - sgn * l) / 2;
  const double ab = std::abs(b);
  return {m, l, b, level, 2.0 * ab * (level + 0.5), ab * (level + 0.5)};
}

double qho_value(int m, double omega, double x) {
  const double xi = std::sqrt(0.5 * omega) * x;
  return std::pow(0.5 * omega, 0.25) * hermite_function(m, xi);
}

cplx landau_value(int m, int l, double b, double x1, double x2) {
  const double ab = std::abs(b);
  const int al = std::abs(l);
  const double r2 = x1 * x1 + x2 * x2;
  // p^2 * 2 pi (2/|b|)^{|l|} (m+|l|)! / (m! |b|) = 1
  const double log_norm_sq = std::log(2.0 * pi) + al * std::log(2.0 / ab) + std::lgamma(m + al + 1.0) -
                             std::lgamma(m + 1.0) - std::log(ab);
  const double p = std::exp(-0.5 * log_norm_sq);
  const cplx z(x1, l >= 0 ? x2 : -x2);  // r e^{+-i phi}
  cplx zl = 1.0;
  for (int j = 0; j < al; ++j) zl *= z;
  return p * zl * laguerre<double>(m, al, 0.5 * ab * r2) * std::exp(-0.25 * ab * r2);
}

namespace {

template <typename Entry>
EigenfunctionSample<Entry> finish(Entry e, WaveField f) {
  if (f.boundary_ratio() > kEigenBoundaryTolerance) {
    throw GridError("grid too narrow: eigenfunction boundary/peak = " + short_num(f.boundary_ratio()) +
                    " exceeds 1e-14");
  }
  const double norm = f.norm();
  return {e, std::move(f), norm};
}

}  // namespace

EigenfunctionSample<OscillatorSpectrumEntry> qho_eigenfunction(int m, double omega, const GridSpec& grid) {
  grid.validate();
  if (grid.dim != 1) throw DomainError("qho_eigenfunction needs a one-dimensional grid");
  const auto entry = oscillator_entry(m, omega);
  WaveField f = sample(grid, [&](const Point& x) { return cplx(qho_value(m, omega, x[0])); });
  return finish(entry, std::move(f));
}

EigenfunctionSample<LandauSpectrumEntry> landau_eigenfunction(int m, int l, double b, const GridSpec& grid) {
  grid.validate();
  if (grid.dim != 2) throw DomainError("landau_eigenfunction needs a two-dimensional grid");
  const auto entry = landau_entry(m, l, b);
  WaveField f = sample(grid, [&](const Point& x) { return landau_value(m, l, b, x[0], x[1]); });
  return finish(entry, std::move(f));
}

}  // namespace gd
