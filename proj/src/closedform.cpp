#include "gaussdecay/closedform.hpp"

#include <cmath>

namespace gd {

std::string to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

std::string to_string(PhaseReading r) {
  switch (r) {
    case PhaseReading::printed:
      return "printed";
    case PhaseReading::quadratic:
      return "quadratic";
    case PhaseReading::quadratic_conjugate:
      return "quadratic_conjugate";
  }
  return "unknown";
}

Branch parse_branch(const std::string& s) {
  if (s == "plus" || s == "+") return Branch::plus;
  if (s == "minus" || s == "-") return Branch::minus;
  throw DomainError("unknown branch '" + s + "' (expected plus or minus)");
}

PhaseReading parse_reading(const std::string& s) {
  if (s == "printed") return PhaseReading::printed;
  if (s == "quadratic") return PhaseReading::quadratic;
  if (s == "quadratic_conjugate") return PhaseReading::quadratic_conjugate;
  throw DomainError("unknown phase reading '" + s + "'");
}

double h_constant(double omega, Branch branch) {
  if (!(omega > 0.0 && omega < pi)) {
    throw DomainError("h_constant: omega must lie in (0, pi), got " + short_num(omega));
  }
  const double root3 = std::sqrt(3.0);
  return (branch == Branch::plus ? 2.0 + root3 : 2.0 - root3) / std::tan(0.5 * omega);
}

void CounterexampleParams::validate() const {
  if (!(omega > 0.0 && omega < pi)) {
    throw DomainError("closed form needs 0 < omega < pi, got omega=" + short_num(omega));
  }
  if (n < 1 || n > kMaxDim) throw DomainError("closed form dimension out of range");
  if (!(k > 0.5 * n)) {
    throw DomainError("closed form needs k > n/2, got k=" + short_num(k) + ", n=" + std::to_string(n));
  }
}

void CounterexampleParams::validate_magnetic() const {
  validate();
  if (n != 2) throw DomainError("magnetic closed form needs n = 2, got n=" + std::to_string(n));
  if (!(k > 4.0)) throw DomainError("magnetic closed form needs k > 4, got k=" + short_num(k));
}

double CounterexampleParams::h() const { return h_constant(omega, branch); }

namespace {

void check_window(double t) {
  if (!(t >= -0.5 && t <= 0.5)) {
    throw DomainError("closed form is defined for t in [-1/2, 1/2], got t=" + short_num(t));
  }
}

}  // namespace

cplx counterexample_u(const Point& x, double t, const CounterexampleParams& p) {
  check_window(t);
  const double w = p.omega;
  const double h = p.h();
  const double c = std::cos(w * t);
  const double s = std::sin(w * t);
  const double tn = s / c;
  const double r2 = x.squaredNorm();
  const double n = p.n;
  const double phase = tn * (1.0 - h * h * (1.0 + tn * tn) / (1.0 + h * h * tn * tn));
  const double log_amp = -0.5 * n * std::log(c) - p.k * std::log1p(h * w * r2 / (c * c)) -
                         h * w * r2 / (4.0 * (c * c + h * h * s * s));
  // Base has real part 1, so the principal power is continuous in t.
  const double sign = p.reading == PhaseReading::quadratic_conjugate ? -1.0 : 1.0;
  const cplx prefactor = std::pow(cplx(1.0, sign * h * tn), 2.0 * p.k - 0.5 * n);
  const double theta = p.reading == PhaseReading::printed ? phase : 0.25 * w * r2 * phase;
  return prefactor * std::exp(cplx(log_amp, theta));
}

cplx counterexample_V(const Point& x, double t, const CounterexampleParams& p) {
  check_window(t);
  const double w = p.omega;
  const double h = p.h();
  const double c = std::cos(w * t);
  const double tn = std::tan(w * t);
  const double r2 = x.squaredNorm();
  const double d = c * c / (h * w) + r2;
  if (p.reading == PhaseReading::quadratic_conjugate) {
    return -2.0 * p.k / d * (1.0 / cplx(1.0, -h * tn) + double(p.n) - 2.0 * (1.0 + p.k) * r2 / d);
  }
  return 2.0 * p.k / d * (1.0 / cplx(1.0, h * tn) + double(p.n) - 2.0 * (1.0 + p.k) * r2 / d);
}

double alpha_tilde_sq(ThresholdKind, double parameter) {
  if (!(parameter > 0.0 && parameter < pi)) {
    throw DomainError("alpha_tilde_sq: parameter must lie in (0, pi), got " + short_num(parameter));
  }
  if (parameter < 1e-4) {
    const double p2 = parameter * parameter;
    return 4.0 * (1.0 - p2 / 6.0 + p2 * p2 / 120.0);
  }
  return 4.0 * std::sin(parameter) / parameter;
}

SharpThreshold sharp_threshold(ThresholdKind kind, double parameter) {
  return {kind, parameter, alpha_tilde_sq(kind, parameter)};
}

double endpoint_rate(double omega) {
  if (!(omega > 0.0 && omega < pi)) throw DomainError("endpoint_rate: omega must lie in (0, pi)");
  return omega / (8.0 * std::sin(omega));
}

EndpointRateFit measured_endpoint_rate(const CounterexampleParams& p, double t, double r_min, double r_max,
                                       double tolerance) {
  p.validate();
  if (!(r_min > 0.0 && r_max > r_min)) throw DomainError("endpoint fit window must satisfy 0 < r_min < r_max");
  const int samples = 256;
  Eigen::MatrixXd a(samples, 3);
  Eigen::VectorXd y(samples);
  Point x = Point::Zero(p.n);
  for (int i = 0; i < samples; ++i) {
    const double r = r_min + (r_max - r_min) * i / (samples - 1);
    x[0] = r;
    const double mag = std::abs(counterexample_u(x, t, p));
    if (!(mag > 1e-280)) throw ConvergenceError("endpoint fit hit the numerical floor at r=" + short_num(r));
    a(i, 0) = 1.0;
    a(i, 1) = std::log(r);
    a(i, 2) = r * r;
    y[i] = std::log(mag);
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
  const double residual = std::sqrt((a * coef - y).squaredNorm() / samples);
  if (residual > tolerance) {
    throw ConvergenceError("endpoint fit residual " + short_num(residual) + " above tolerance");
  }
  return {-coef[2], coef[1], residual, r_min, r_max};
}

}  // namespace gd
