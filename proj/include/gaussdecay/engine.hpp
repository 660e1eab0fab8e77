#pragma once

#include <string>
#include <vector>

#include "gaussdecay/closedform.hpp"
#include "gaussdecay/fields.hpp"
#include "gaussdecay/grid.hpp"
#include "gaussdecay/spectral.hpp"
#include "gaussdecay/transforms.hpp"

namespace gd {

/// Equation factories. Each enforces the parameter bounds of the statement it
/// belongs to and quotes the bound when it throws DomainError.
EquationSpec free_equation(int n, double T);
EquationSpec harmonic_equation(int n, double omega, double T);
EquationSpec repulsive_equation(int n, double nu, double T);
EquationSpec uniform_magnetic_equation(int n, double b, double T);
EquationSpec electric_equation(int n, VectorFn e_fn, double T);
/// Closed-form pair on [-1/2, 1/2] with quadratic term w^2|x|^2/4.
EquationSpec counterexample_equation(const CounterexampleParams& p);
/// Closed-form pair with A = (b/2)(-x2, x1), b = omega, n = 2, k > 4.
EquationSpec counterexample_magnetic_equation(const CounterexampleParams& p);

/// Delta_A at time t with A taken from the potential.
WaveField magnetic_laplacian(const WaveField& u, const MagneticPotential& a, double t = 0.0);

struct PropagateOptions {
  double boundary_tolerance = 1e-10;
  int boundary_check_every = 64;
  /// Stop when |A|_inf * kmax * dt reaches this bound.
  double magnetic_cfl = 0.5;
};

/// Strang split-step from field.time to t_target with steps of at most dt:
/// half potential, half kinetic, magnetic RK4 substep, half kinetic, half potential.
WaveField propagate(const WaveField& u, const EquationSpec& eq, double t_target, double dt,
                    const PropagateOptions& opt = {});

/// Exact free flow i u_t - Delta u = 0 over a time span s.
WaveField free_propagate(const WaveField& u, double s);

/// Exact oscillator flow from data at time 0, |omega t| < pi/2.
WaveField harmonic_oracle(const WaveField& data, double omega, double t);

/// Exact uniform-magnetic flow in the symmetric gauge (even n, axis pairs),
/// |b t| < pi/2: oscillator flow with omega = b followed by rotation e^{-Mt}.
WaveField magnetic_oracle(const WaveField& data, double b, double t);

/// Relative L2 residual of i u_t - Delta_A u + (V + E.x + k + q|x|^2) u at time t,
/// spectral in space and fourth-order central differences in time.
double residual(const ComplexField& solution, const EquationSpec& eq, const GridSpec& grid, double t,
                double dt_fd = 1e-3);

/// Relative eigen-residual ||(-Delta_A + P(t)) psi - E psi|| / ||psi||, where P is
/// the total electric part of eq at time t. Standing waves are e^{iEt} psi.
double eigen_residual(const WaveField& psi, const EquationSpec& eq, double energy, double t = 0.0);

struct ReadingVerdict {
  std::vector<std::pair<PhaseReading, double>> residuals;  // max over sampled times
  PhaseReading selected = PhaseReading::quadratic_conjugate;
  double selected_residual = 0.0;
};

/// Runs the PDE residual for every phase reading and selects the smallest.
ReadingVerdict arbitrate_reading(CounterexampleParams p, const GridSpec& grid, const std::vector<double>& times,
                                 bool magnetic = false);

/// Centered Gaussian solution pref(t) exp(-a(t)|x|^2) of the free, harmonic
/// or repulsive equation, from data exp(-a0|x|^2).
struct GaussianSolution {
  enum class Kind { free, harmonic, repulsive };
  int n = 1;
  cplx a0 = 1.0;
  Kind kind = Kind::free;
  double parameter = 0.0;

  cplx width(double t) const;
  cplx prefactor(double t) const;
  cplx value(const Point& x, double t) const;
  WaveField sample(const GridSpec& grid, double t) const;
};

}  // namespace gd
