#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "gaussdecay/grid.hpp"

namespace gd {

/// Physicists' Hermite polynomial H_m(x) by the three-term recurrence
/// H_{m+1} = 2x H_m - 2m H_{m-1}.
template <typename Real>
Real hermite(int m, Real x) {
  if (m < 0) throw DomainError("hermite: degree must be non-negative");
  if (!std::isfinite(x)) throw DomainError("hermite: argument must be finite");
  Real prev = 1;
  if (m == 0) return prev;
  Real cur = 2 * x;
  for (int j = 1; j < m; ++j) {
    const Real next = 2 * x * cur - 2 * Real(j) * prev;
    prev = cur;
    cur = next;
    if (!std::isfinite(cur)) {
      throw RangeError("hermite: H_" + std::to_string(m) + " overflows at x=" + std::to_string(double(x)));
    }
  }
  return cur;
}

/// Generalized Laguerre polynomial L_m^(alpha)(x) by
/// (j+1) L_{j+1} = (2j+1+alpha-x) L_j - (j+alpha) L_{j-1}.
template <typename Real>
Real laguerre(int m, Real alpha, Real x) {
  if (m < 0) throw DomainError("laguerre: degree must be non-negative");
  if (!(alpha >= 0)) throw DomainError("laguerre: alpha must be >= 0");
  if (!(x >= 0) || !std::isfinite(x)) throw DomainError("laguerre: x must be finite and >= 0");
  Real prev = 1;
  if (m == 0) return prev;
  Real cur = 1 + alpha - x;
  for (int j = 1; j < m; ++j) {
    const Real next = ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / Real(j + 1);
    prev = cur;
    cur = next;
    if (!std::isfinite(cur)) {
      throw RangeError("laguerre: L_" + std::to_string(m) + " overflows at x=" + std::to_string(double(x)));
    }
  }
  return cur;
}

/// Normalized Hermite function h_m H_m(xi) e^{-xi^2/2} with unit L^2 norm in
/// xi, by the orthonormal recurrence. Never overflows for finite xi.
template <typename Real>
Real hermite_function(int m, Real xi) {
  if (m < 0) throw DomainError("hermite_function: degree must be non-negative");
  using std::exp;
  using std::sqrt;
  const Real quarter_pi = Real(0.7511255444649425);  // pi^{-1/4}
  Real prev = quarter_pi * exp(-xi * xi / 2);
  if (m == 0) return prev;
  Real cur = sqrt(Real(2)) * xi * prev;
  for (int j = 1; j < m; ++j) {
    const Real next = sqrt(Real(2) / (j + 1)) * xi * cur - sqrt(Real(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

struct OscillatorSpectrumEntry {
  int m = 0;
  double omega = 1.0;
  double energy = 0.5;
};

/// Symmetric-gauge Landau state (m, l) for A = (b/2)(-x2, x1).
/// `level` is k = m + (|l| - sgn(b) l)/2. `energy` is the eigenvalue of
/// -(grad - iA)^2, which is 2|b|(k + 1/2); `nominal_level` is |b|(k + 1/2).
struct LandauSpectrumEntry {
  int m = 0;
  int l = 0;
  double b = 1.0;
  int level = 0;
  double energy = 1.0;
  double nominal_level = 0.5;
};

template <typename Entry>
struct EigenfunctionSample {
  Entry entry;
  WaveField field;
  double l2norm = 0.0;
};

OscillatorSpectrumEntry oscillator_entry(int m, double omega);
LandauSpectrumEntry landau_entry(int m, int l, double b);

/// psi_m(x) = h_m H_m(sqrt(omega/2) x) e^{-omega x^2/4}, unit L^2 norm.
/// Throws GridError if the boundary exceeds 1e-14 of the peak.
EigenfunctionSample<OscillatorSpectrumEntry> qho_eigenfunction(int m, double omega, const GridSpec& grid);

/// p r^{|l|} L_m^{|l|}(|b| r^2/2) e^{i l phi} e^{-|b| r^2/4}, unit L^2 norm.
EigenfunctionSample<LandauSpectrumEntry> landau_eigenfunction(int m, int l, double b, const GridSpec& grid);

/// Pointwise values, without grid checks.
double qho_value(int m, double omega, double x);
cplx landau_value(int m, int l, double b, double x1, double x2);

/// Boundary tolerance used by the eigenfunction samplers.
inline constexpr double kEigenBoundaryTolerance = 1e-14;

}  // namespace gd
