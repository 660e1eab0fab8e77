#include "gaussdecay/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaussdecay/fft.hpp"
#include "gaussdecay/interp.hpp"

namespace gd {

namespace {

void check_dim(int n) {
  if (n < 1 || n > kMaxDim) throw DomainError("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

EquationSpec free_equation(int n, double T) {
  check_dim(n);
  if (!(T > 0.0)) throw DomainError("time window needs T > 0");
  EquationSpec eq;
  eq.dim = n;
  eq.magnetic = MagneticPotential::zero(n);
  eq.t0 = 0.0;
  eq.t1 = T;
  eq.name = "free";
  return eq;
}

EquationSpec harmonic_equation(int n, double omega, double T) {
  EquationSpec eq = free_equation(n, T);
  if (!(omega > 0.0 && omega * T < 0.5 * pi)) {
    throw DomainError("harmonic oscillator needs 0 < omega < pi/(2T); got omega=" + short_num(omega) + ", T=" + short_num(T) +
                      " (omega*T=" + short_num(omega * T) + ")");
  }
  eq.electric = ElectricPotential::quadratic_only(0.25 * omega * omega);
  eq.name = "harmonic";
  return eq;
}

EquationSpec repulsive_equation(int n, double nu, double T) {
  EquationSpec eq = free_equation(n, T);
  if (!(nu > 0.0 && nu * T < 1.0)) {
    throw DomainError("repulsive oscillator needs 0 < nu < 1/T; got nu=" + short_num(nu) + ", T=" + short_num(T) +
                      " (nu*T=" + short_num(nu * T) + ")");
  }
  eq.electric = ElectricPotential::quadratic_only(-0.25 * nu * nu);
  eq.name = "repulsive";
  return eq;
}

EquationSpec uniform_magnetic_equation(int n, double b, double T) {
  EquationSpec eq = free_equation(n, T);
  if (n % 2 != 0) throw DomainError("uniform magnetic field needs even n (M^T M = b^2 Id); got n=" + std::to_string(n));
  if (!(b > 0.0 && b * T < 0.5 * pi)) {
    throw DomainError("uniform magnetic field needs 0 < b < pi/(2T); got b=" + short_num(b) + ", T=" + short_num(T) +
                      " (b*T=" + short_num(b * T) + ")");
  }
  eq.magnetic = make_uniform_magnetic(n, b);
  eq.name = "uniform_magnetic";
  return eq;
}

EquationSpec electric_equation(int n, VectorFn e_fn, double T) {
  EquationSpec eq = free_equation(n, T);
  eq.electric.e_drive = std::move(e_fn);
  eq.electric.time_dependent = true;
  eq.name = "electric";
  return eq;
}

EquationSpec counterexample_equation(const CounterexampleParams& p) {
  p.validate();
  EquationSpec eq;
  eq.dim = p.n;
  eq.magnetic = MagneticPotential::zero(p.n);
  eq.electric = ElectricPotential::quadratic_only(0.25 * p.omega * p.omega);
  eq.electric.v2 = from_xt<cplx>([p](const Point& x, double t) { return counterexample_V(x, t, p); });
  eq.electric.time_dependent = true;
  eq.t0 = -0.5;
  eq.t1 = 0.5;
  eq.name = "counterexample";
  return eq;
}

EquationSpec counterexample_magnetic_equation(const CounterexampleParams& p) {
  p.validate_magnetic();
  EquationSpec eq;
  eq.dim = 2;
  eq.magnetic = make_uniform_magnetic(2, p.omega);
  eq.electric.v2 = from_xt<cplx>([p](const Point& x, double t) { return counterexample_V(x, t, p); });
  eq.electric.time_dependent = true;
  eq.t0 = -0.5;
  eq.t1 = 0.5;
  eq.name = "counterexample_magnetic";
  return eq;
}

WaveField magnetic_laplacian(const WaveField& u, const MagneticPotential& a, double t) {
  return magnetic_laplacian(u, a.sample(u.grid, t));
}

namespace {

Eigen::ArrayXcd sample_multiplier(const EquationSpec& eq, const GridSpec& grid, double t) {
  const Slice<cplx> p = eq.electric.total_at(t, grid.dim);
  Eigen::ArrayXcd out(grid.size());
  for_each_point(grid, [&](Eigen::Index i, const Point& x) { out[i] = p(x); });
  return out;
}

// du/dt = -(div A) u - 2 A.grad u
Eigen::ArrayXcd drift(const WaveField& u, const MagneticSamples& a) {
  const auto g = gradient(u);
  Eigen::ArrayXcd out = -a.div * u.values;
  for (int d = 0; d < u.grid.dim; ++d) out -= 2.0 * a.a[d] * g[d];
  return out;
}

void rk4_drift(WaveField& u, const MagneticSamples& a, double h) {
  WaveField tmp = u;
  const Eigen::ArrayXcd k1 = drift(u, a);
  tmp.values = u.values + 0.5 * h * k1;
  const Eigen::ArrayXcd k2 = drift(tmp, a);
  tmp.values = u.values + 0.5 * h * k2;
  const Eigen::ArrayXcd k3 = drift(tmp, a);
  tmp.values = u.values + h * k3;
  const Eigen::ArrayXcd k4 = drift(tmp, a);
  u.values += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_boundary(const WaveField& u, const PropagateOptions& opt) {
  if (!u.all_finite()) throw StepError("propagate: field became non-finite at t=" + short_num(u.time));
  const double ratio = u.boundary_ratio();
  if (ratio > opt.boundary_tolerance) {
    throw GridError("propagate: boundary/peak ratio " + short_num(ratio) + " exceeds " + short_num(opt.boundary_tolerance) +
                    " at t=" + short_num(u.time));
  }
}

}  // namespace

WaveField propagate(const WaveField& u, const EquationSpec& eq, double t_target, double dt,
                    const PropagateOptions& opt) {
  const GridSpec& grid = u.grid;
  grid.validate();
  if (grid.dim != eq.dim) throw DomainError("propagate: equation dimension does not match grid");
  if (!(dt > 0.0)) throw StepError("propagate: dt must be positive");
  const double span = t_target - u.time;
  WaveField out = u;
  if (span == 0.0) return out;
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9)));
  const double h = span / static_cast<double>(steps);

  const bool magnetic = !eq.magnetic.is_zero();
  const bool frozen = !eq.time_dependent();
  const double kmax = grid.max_wavenumber();
  const Fft fft(grid);
  const Eigen::ArrayXd k2 = squared_wavenumber(grid);
  const Eigen::ArrayXcd kin_half = (I * (0.5 * h) * k2).exp();
  const Eigen::ArrayXcd kin_full = (I * h * k2).exp();

  auto potential_with_a2 = [&](double t) {
    Eigen::ArrayXcd p = sample_multiplier(eq, grid, t);
    if (magnetic) p += eq.magnetic.sample(grid, t).a2;
    return p;
  };
  auto check_cfl = [&](const MagneticSamples& a) {
    const double c = a.sup_norm * kmax * std::abs(h);
    if (c >= opt.magnetic_cfl) {
      throw StepError("propagate: magnetic step restriction |A|_inf*kmax*dt < " + short_num(opt.magnetic_cfl) +
                      " violated (" + short_num(c) + "); reduce dt below " +
                      short_num(opt.magnetic_cfl / (a.sup_norm * kmax)));
    }
  };

  Eigen::ArrayXcd p_cur = potential_with_a2(out.time);
  MagneticSamples a_frozen;
  if (magnetic && frozen) {
    a_frozen = eq.magnetic.sample(grid, out.time);
    check_cfl(a_frozen);
  }
  const Eigen::ArrayXcd half_frozen = (I * (0.5 * h) * p_cur).exp();

  for (long s = 0; s < steps; ++s) {
    const double t0 = u.time + h * static_cast<double>(s);
    const double t1 = (s + 1 == steps) ? t_target : u.time + h * static_cast<double>(s + 1);
    if (frozen) {
      out.values *= half_frozen;
    } else {
      out.values *= (I * (0.5 * h) * p_cur).exp();
    }
    fft.forward(out.values);
    if (magnetic) {
      out.values *= kin_half;
      fft.inverse(out.values);
      if (frozen) {
        rk4_drift(out, a_frozen, h);
      } else {
        const MagneticSamples a_mid = eq.magnetic.sample(grid, 0.5 * (t0 + t1));
        check_cfl(a_mid);
        rk4_drift(out, a_mid, h);
      }
      fft.forward(out.values);
      out.values *= kin_half;
    } else {
      out.values *= kin_full;
    }
    fft.inverse(out.values);
    if (frozen) {
      out.values *= half_frozen;
    } else {
      p_cur = potential_with_a2(t1);
      out.values *= (I * (0.5 * h) * p_cur).exp();
    }
    out.time = t1;
    if (opt.boundary_check_every > 0 && (s + 1) % opt.boundary_check_every == 0) check_boundary(out, opt);
  }
  check_boundary(out, opt);
  return out;
}

WaveField free_propagate(const WaveField& u, double s) {
  WaveField out = u;
  const Fft fft(u.grid);
  fft.forward(out.values);
  out.values *= (I * s * squared_wavenumber(u.grid)).exp();
  fft.inverse(out.values);
  out.time = u.time + s;
  return out;
}

WaveField harmonic_oracle(const WaveField& data, double omega, double t) {
  if (!(omega > 0.0)) throw DomainError("harmonic_oracle needs omega > 0");
  if (!(std::abs(omega * t) < 0.5 * pi)) {
    throw DomainError("harmonic_oracle needs |omega t| < pi/2; got omega*t=" + short_num(omega * t));
  }
  if (t == 0.0) return data;
  const double span = std::abs(t);
  WaveField phi = free_propagate(data, std::tan(omega * t) / omega);
  phi.time = std::tan(omega * t) / omega;
  TransformRecord fwd = harmonic_removal(omega, span, data.grid.dim);
  fwd.domain = {-fwd.domain.hi, fwd.domain.hi};
  WaveField out = apply(inverse(fwd), phi, 1e-8);
  out.time = data.time + t;
  return out;
}

WaveField magnetic_oracle(const WaveField& data, double b, double t) {
  const int n = data.grid.dim;
  const MagneticPotential m = make_uniform_magnetic(n, b);
  if (!(std::abs(b * t) < 0.5 * pi)) throw DomainError("magnetic_oracle needs |b t| < pi/2; got b*t=" + short_num(b * t));
  WaveField h = harmonic_oracle(data, b, t);
  WaveField out = rotate(h, rotation_planes(*m.uniform, -t));
  out.time = h.time;
  return out;
}

double residual(const ComplexField& solution, const EquationSpec& eq, const GridSpec& grid, double t, double dt_fd) {
  grid.validate();
  if (grid.dim != eq.dim) throw DomainError("residual: equation dimension does not match grid");
  WaveField s[5];
  for (int j = 0; j < 5; ++j) {
    const double tj = t + (j - 2) * dt_fd;
    s[j] = sample(grid, [&](const Point& x) { return solution(x, tj); }, tj);
  }
  const WaveField& u = s[2];
  const Eigen::ArrayXcd ut = (s[0].values - 8.0 * s[1].values + 8.0 * s[3].values - s[4].values) / (12.0 * dt_fd);
  const WaveField lap = magnetic_laplacian(u, eq.magnetic, t);
  const Eigen::ArrayXcd p = sample_multiplier(eq, grid, t);
  const Eigen::ArrayXcd r = I * ut - lap.values + p * u.values;
  return std::sqrt(r.abs2().sum() / u.values.abs2().sum());
}

double eigen_residual(const WaveField& psi, const EquationSpec& eq, double energy, double t) {
  if (psi.grid.dim != eq.dim) throw DomainError("eigen_residual: equation dimension does not match grid");
  const WaveField lap = magnetic_laplacian(psi, eq.magnetic, t);
  const Eigen::ArrayXcd p = sample_multiplier(eq, psi.grid, t);
  const Eigen::ArrayXcd r = -lap.values + p * psi.values - energy * psi.values;
  return std::sqrt(r.abs2().sum() / psi.values.abs2().sum());
}

ReadingVerdict arbitrate_reading(CounterexampleParams p, const GridSpec& grid, const std::vector<double>& times,
                                 bool magnetic) {
  ReadingVerdict v;
  double best = std::numeric_limits<double>::infinity();
  for (PhaseReading r : {PhaseReading::printed, PhaseReading::quadratic, PhaseReading::quadratic_conjugate}) {
    p.reading = r;
    const EquationSpec eq = magnetic ? counterexample_magnetic_equation(p) : counterexample_equation(p);
    double worst = 0.0;
    for (double t : times) {
      worst = std::max(worst, residual([&](const Point& x, double tt) { return counterexample_u(x, tt, p); }, eq,
                                       grid, t));
    }
    v.residuals.emplace_back(r, worst);
    if (worst < best) {
      best = worst;
      v.selected = r;
    }
  }
  v.selected_residual = best;
  return v;
}

cplx GaussianSolution::width(double t) const {
  const double w = parameter;
  switch (kind) {
    case Kind::free:
      return a0 / (1.0 - 4.0 * I * a0 * t);
    case Kind::harmonic: {
      const cplx z0 = 4.0 * a0 / w;
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      return 0.25 * w * (z0 * c - I * s) / (c - I * z0 * s);
    }
    case Kind::repulsive: {
      const cplx y0 = -I * 4.0 * a0 / w;
      const double th = std::tanh(w * t);
      return 0.25 * w * I * (y0 + th) / (1.0 + y0 * th);
    }
  }
  return a0;
}

cplx GaussianSolution::prefactor(double t) const {
  const double w = parameter;
  const double e = -0.5 * n;
  switch (kind) {
    case Kind::free:
      return std::pow(1.0 - 4.0 * I * a0 * t, e);
    case Kind::harmonic: {
      const cplx z0 = 4.0 * a0 / w;
      return std::pow(std::cos(w * t) - I * z0 * std::sin(w * t), e);
    }
    case Kind::repulsive: {
      const cplx y0 = -I * 4.0 * a0 / w;
      return std::pow(std::cosh(w * t) + y0 * std::sinh(w * t), e);
    }
  }
  return 1.0;
}

cplx GaussianSolution::value(const Point& x, double t) const {
  return prefactor(t) * std::exp(-width(t) * x.squaredNorm());
}

WaveField GaussianSolution::sample(const GridSpec& grid, double t) const {
  const cplx p = prefactor(t);
  const cplx a = width(t);
  return gd::sample(grid, [&](const Point& x) { return p * std::exp(-a * x.squaredNorm()); }, t);
}

}  // namespace gd
