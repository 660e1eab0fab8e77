#pragma once

#include <string>
#include <vector>

#include "gaussdecay/core.hpp"

namespace gd {

enum class Branch { plus, minus };

/// How the imaginary exponent of the closed-form solution is read.
///  printed:             i tan(wt)(1 - h^2(1+tan^2)/(1+h^2 tan^2)), prefactor (1+ih tan)^{2k-n/2}
///  quadratic:           same term times w|x|^2/4
///  quadratic_conjugate: quadratic phase, prefactor (1-ih tan)^{2k-n/2}, potential -conj(V)
enum class PhaseReading { printed, quadratic, quadratic_conjugate };

std::string to_string(Branch b);
std::string to_string(PhaseReading r);
Branch parse_branch(const std::string& s);
PhaseReading parse_reading(const std::string& s);

struct CounterexampleParams {
  double omega = 1.0;
  int n = 1;
  double k = 1.0;
  Branch branch = Branch::plus;
  PhaseReading reading = PhaseReading::quadratic_conjugate;

  /// omega in (0, pi) and k > n/2.
  void validate() const;
  /// Additionally n == 2 and k > 4.
  void validate_magnetic() const;
  double h() const;
};

enum class ThresholdKind { harmonic, magnetic };

struct SharpThreshold {
  ThresholdKind kind = ThresholdKind::harmonic;
  double parameter = 1.0;
  double alpha_tilde_sq = 0.0;
};

/// h = (2 +- sqrt 3)/tan(omega/2), omega in (0, pi).
double h_constant(double omega, Branch branch);

/// Closed-form solution on t in [-1/2, 1/2].
cplx counterexample_u(const Point& x, double t, const CounterexampleParams& p);

/// Complex potential paired with counterexample_u under the same reading.
cplx counterexample_V(const Point& x, double t, const CounterexampleParams& p);

/// 4 sin(parameter)/parameter on (0, pi), with the series near 0.
double alpha_tilde_sq(ThresholdKind kind, double parameter);
SharpThreshold sharp_threshold(ThresholdKind kind, double parameter);

/// Closed-form endpoint rate omega/(8 sin omega).
double endpoint_rate(double omega);

struct EndpointRateFit {
  double rate = 0.0;
  double poly = 0.0;
  double residual = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Fits log|u(x, t)| against {1, log r, r^2} along a ray, with the 2k log r
/// term included in the model. Throws ConvergenceError when the fit residual
/// exceeds `tolerance`.
EndpointRateFit measured_endpoint_rate(const CounterexampleParams& p, double t = 0.5, double r_min = 4.0,
                                       double r_max = 20.0, double tolerance = 1e-2);

}  // namespace gd
