#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaussdecay/grid.hpp"
#include "gaussdecay/interp.hpp"
#include "gaussdecay/spectral.hpp"

namespace gd {

/// A field frozen at one time instant. Potentials are stored as t -> (x -> value)
/// so time-dependent coefficients are evaluated once per slice, not per point.
template <typename T>
using Slice = std::function<T(const Point&)>;
template <typename T>
using TimeSliced = std::function<Slice<T>(double)>;

template <typename T, typename F>
TimeSliced<T> steady(F f) {
  return [f](double) { return Slice<T>(f); };
}

template <typename T, typename F>
TimeSliced<T> from_xt(F f) {
  return [f](double t) { return Slice<T>([f, t](const Point& x) { return T(f(x, t)); }); };
}

/// V = V1 + V2 plus the linear drive E(t).x, the phase drive k(t) and the
/// quadratic term q(t)|x|^2. Empty callables stand for zero.
struct ElectricPotential {
  ScalarField v1;
  TimeSliced<cplx> v2;
  VectorFn e_drive;
  RealFn phase_drive;
  RealFn quadratic;
  bool time_dependent = false;

  static ElectricPotential zero() { return {}; }
  static ElectricPotential quadratic_only(double q);

  double q(double t) const { return quadratic ? quadratic(t) : 0.0; }
  double k(double t) const { return phase_drive ? phase_drive(t) : 0.0; }
  Point e(double t, int dim) const { return e_drive ? e_drive(t) : Point(Point::Zero(dim)); }

  /// V1 + V2 at time t, without drives and quadratic part.
  Slice<cplx> potential_at(double t) const;
  /// Full pointwise multiplier V + E.x + k + q|x|^2 at time t.
  Slice<cplx> total_at(double t, int dim) const;
};

/// A = a(x, t) + M x / 2. `jacobian(x)(i, j)` is d_j A^i of the non-uniform
/// part; when absent it is computed by fourth-order central differences.
/// B_{jk} = d_j A^k - d_k A^j, i.e. B = J^T - J.
struct MagneticPotential {
  MagneticPotential() = default;
  explicit MagneticPotential(int n) : dim(n) {}

  int dim = 1;
  TimeSliced<Point> a;
  TimeSliced<Mat> jacobian;
  std::optional<Mat> uniform;
  std::optional<Point> xi;
  bool time_dependent = false;

  static MagneticPotential zero(int dim) { return MagneticPotential(dim); }
  static MagneticPotential from_field(int dim, VectorField a_fn, MatrixField jac = {});

  bool is_zero() const { return !a && !uniform; }

  Slice<Point> total_at(double t) const;
  Slice<Mat> jacobian_at(double t) const;
  Slice<Mat> field_at(double t) const;

  MagneticSamples sample(const GridSpec& grid, double t) const;
};

/// Step for finite-difference Jacobians of vector potentials.
inline constexpr double kJacobianStep = 1e-3;

Mat fd_jacobian(const Slice<Point>& a, const Point& x, double step = kJacobianStep);

/// Block-diagonal M with M(i,j) = -b, M(j,i) = b on each axis pair, so that
/// M^T = -M and M^T M = b^2 Id. An empty pairing means (0,1), (2,3), ...
MagneticPotential make_uniform_magnetic(int n, double b, std::vector<std::pair<int, int>> pairing = {});

/// Rotation planes of e^{M t} for a block-diagonal antisymmetric M.
std::vector<PlaneRotation> rotation_planes(const Mat& m, double t);

struct GaugeResult {
  std::function<double(const Point&)> phi;
  Slice<Point> a_tilde;
  Slice<Point> psi;
  /// Samples on the grid (row-major, one column per component).
  Eigen::MatrixXd a_tilde_samples;
  double max_transversality = 0.0;
};

/// Cronstrom reduction at time t: phi(x) = x . int_0^1 A(s x) ds,
/// A~ = A - grad phi = int_0^1 Psi(s x) ds with Psi(x) = x^T B(x), so x . A~ = 0.
/// Radial integrals use adaptive Gauss-Legendre at relative tolerance `tol`.
GaugeResult cronstrom_gauge(const MagneticPotential& a, const GridSpec& grid, double t = 0.0, double tol = 1e-12);

struct HEReport {
  double v1_sup = 0.0;
  bool v1_bounded = true;
  double weighted_v2_log_sup = -std::numeric_limits<double>::infinity();
  double im_v2_sup = 0.0;
  bool weighted_bounded = true;
  bool pass = true;
  std::string note;
};

/// Grid-sampled (HE) check on [0, T] with weight e^{T^2|x|^2/(alpha t + beta(T-t))^2}.
/// Boundedness is judged by comparing the supremum on the outer shell of the
/// box with the supremum inside half the box.
HEReport validate_HE(const ElectricPotential& v, double alpha, double beta, double T, const GridSpec& grid,
                     int time_samples = 11);

struct HMReport {
  double psi_sup = 0.0;
  bool psi_bounded = true;
  double field_sup = 0.0;
  bool xi_declared = false;
  double xi_residual = 0.0;
  bool xi_ok = false;
  bool pass = true;
  std::string note;
};

HMReport validate_HM(const MagneticPotential& a, const GridSpec& grid, double t = 0.0);

/// i u_t - Delta_A u + (V + E.x + k + q|x|^2) u = 0 on [t0, t1].
struct EquationSpec {
  int dim = 1;
  ElectricPotential electric;
  MagneticPotential magnetic{1};
  double t0 = 0.0;
  double t1 = 1.0;
  std::string name = "custom";

  bool time_dependent() const { return electric.time_dependent || magnetic.time_dependent; }
};

}  // namespace gd
