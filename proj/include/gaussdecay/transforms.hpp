#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaussdecay/fields.hpp"
#include "gaussdecay/interp.hpp"

namespace gd {

/// Spatial data of a record at one output time t:
/// phi(x, t) = weight(x) * u(scale * R x + shift, source_time(t)).
struct AffineFrame {
  double scale = 1.0;
  std::vector<PlaneRotation> planes;
  Mat rotation;
  Point shift;
  Slice<cplx> weight;
};

struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t, double slack = 1e-12) const {
    const double pad = slack * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    return t >= lo - pad && t <= hi + pad;
  }
};

using EquationRewrite = std::function<EquationSpec(const EquationSpec&)>;

/// One invertible change of variables u -> phi.
struct TransformRecord {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  int dim = 1;
  RealFn source_time;  // t -> time of u feeding phi(., t)
  RealFn target_time;  // inverse of source_time
  std::function<AffineFrame(double)> frame;
  EquationRewrite rewrite;
  EquationRewrite inverse_rewrite;
  TimeWindow domain;  // admissible output times t
  bool unitary = true;

  nlohmann::json describe() const;
};

struct TransformChain {
  std::vector<TransformRecord> records;

  TimeWindow domain() const;
  EquationSpec rewrite(const EquationSpec& eq) const;
  nlohmann::json describe() const;
};

/// C^2 path with its first two derivatives.
struct Path {
  VectorFn s;
  VectorFn s_dot;
  VectorFn s_ddot;
};

/// phi = exp(-i int_0^t k) u removes a phase drive k(t).
TransformRecord phase_removal(RealFn k_fn, int dim, TimeWindow window = {-1e300, 1e300});

/// phi(x,t) = exp[i S'.x/2 + i int_0^t (|S'|^2/4 - E.S)] u(x + S(t), t).
/// E is the drive of the equation the record is applied to.
TransformRecord galilean(VectorFn e_fn, Path path, int dim, TimeWindow window = {-1e300, 1e300});

/// Galilean record with S(t) = -2(int_0^t (t-s)E(s)ds - (t/T) int_0^T (T-s)E(s)ds),
/// so S'' = -2E and S(0) = S(T) = 0. A phase drive k_fn is removed as well.
TransformRecord electric_removal(VectorFn e_fn, double T, int dim, RealFn k_fn = {});
Path electric_path(VectorFn e_fn, double T, int dim);

/// Dilation family with scale a(t) > 0.
struct Scale {
  RealFn a;
  RealFn a_dot;
  RealFn a_ddot;
};

/// phi(x,t) = a^{-n/2} exp[-i (a'/4a)|x|^2] u(x/a, int_0^t a^{-2}).
TransformRecord comoving(Scale a, int dim, TimeWindow window);

/// Comoving with a = sqrt(1 + w^2 t^2): removes the (w^2/4)|x|^2 term on [0, T].
TransformRecord harmonic_removal(double omega, double T, int dim);

/// Comoving with a = sqrt(1 - v^2 t^2): removes the -(v^2/4)|x|^2 term on [0, T].
TransformRecord repulsive_removal(double nu, double T, int dim);

/// phi(x,t) = u(e^{Mt} x, t) for antisymmetric M; trades the uniform part Mx/2
/// of A for the harmonic term |Mx|^2/4.
TransformRecord rotating_frame(const Mat& m, TimeWindow window = {-1e300, 1e300});

/// Generic inverse: u(y, tau) = phi(R^T(y - S)/scale, t) / weight.
TransformRecord inverse(const TransformRecord& r);
TransformChain inverse(const TransformChain& c);

struct ApplyReport {
  WaveField field;
  double lost_fraction = 0.0;  // share of |u|^2 whose preimage leaves the box
};

/// Applies the record to a field sampled at source time tau = field.time.
ApplyReport apply_with_report(const TransformRecord& r, const WaveField& u);

/// As apply_with_report, but throws GridError if lost_fraction > tolerance.
WaveField apply(const TransformRecord& r, const WaveField& u, double tolerance = 1e-10);
WaveField apply(const TransformChain& c, const WaveField& u, double tolerance = 1e-10);

}  // namespace gd
