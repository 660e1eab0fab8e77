#pragma once

#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gd {

/// Largest spatial dimension the library is compiled for. Points and small
/// matrices live on the stack up to this size.
inline constexpr int kMaxDim = 4;

using cplx = std::complex<double>;
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using RealFn = std::function<double(double)>;
using VectorFn = std::function<Point(double)>;
using ScalarField = std::function<double(const Point&)>;
using ComplexField = std::function<cplx(const Point&, double)>;
using VectorField = std::function<Point(const Point&, double)>;
using MatrixField = std::function<Mat(const Point&, double)>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

/// Short form (%.6g) for numbers quoted in error messages.
inline std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Parameter outside the mathematical domain of an operation (theorem guards,
/// negative frequencies, odd dimension for uniform fields, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result not representable in double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Grid too small, field touching the box, or resampling losing support.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-step restrictions of the propagator.
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gd
