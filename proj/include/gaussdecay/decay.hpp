#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gaussdecay/grid.hpp"

namespace gd {

/// Fitted model |u| ~ C r^poly e^{-rate r^2}.
struct DecayReport {
  double rate = 0.0;
  double poly_correction = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double fit_residual = 0.0;
  bool floor_hit = false;
  bool trusted = false;
  int shells_used = 0;
};

struct FitOptions {
  /// Radial window; r_max <= 0 selects it automatically.
  double r_min = 0.0;
  double r_max = 0.0;
  /// Samples below this absolute value are treated as numerical floor.
  double absolute_floor = 1e-280;
  /// Auto window: shells below relative_floor * peak are excluded.
  double relative_floor = 0.0;
  /// Auto window starts where the shell value first drops below start_fraction * peak.
  double start_fraction = 1e-3;
  /// RMS log residual above which the report is untrusted.
  double residual_threshold = 1e-2;
  /// Fix the power of r instead of fitting it.
  std::optional<double> fixed_poly;
};

/// Least squares of log|u| on {1, log r, r^2} over exact lattice shells
/// (points sharing |x|^2), using the RMS of |u| in each shell.
DecayReport fit_rate(const WaveField& u, const FitOptions& opt = {});

/// fit_rate on the discrete Fourier transform, with wavenumbers as the radial
/// variable (transform convention e^{-i x xi}). A Gaussian e^{-|x|^2/beta^2}
/// gives rate beta^2/4. The auto window keeps shells above 1e-10 of the peak.
DecayReport fourier_decay(const WaveField& u, FitOptions opt = {});

/// alpha^2 paired with a Fourier rate in f^(xi) = O(e^{-4|xi|^2/alpha^2}).
double alpha_sq_from_fourier_rate(double rate);

struct WeightedNorm {
  double value = 0.0;        // +inf when divergent
  double grid_value = 0.0;   // the finite-box quadrature, always reported
  double log_value = 0.0;    // log of grid_value
  bool divergent = false;
  double outer_slope = 0.0;  // d/dr of log shell contribution on the outer 10%
  double floor_radius = 0.0; // largest radius with samples above the noise floor
  std::vector<double> shell_radius;
  std::vector<double> shell_log_contribution;
};

/// ||e^{|x|^2/alpha^2} u||_2 by grid quadrature in the log domain. Samples below
/// relative_floor * peak are dropped as noise. Divergence is declared when the
/// outermost 10% of the remaining radial shells do not decrease.
WeightedNorm weighted_norm(const WaveField& u, double alpha_sq, double relative_floor = 0.0);

enum class ThresholdKindT { free_4T, harmonic_4sin, repulsive_4sinh, magnetic_4sin };
enum class Classification { below_threshold, at_threshold, above_threshold };

std::string to_string(ThresholdKindT k);
std::string to_string(Classification c);
ThresholdKindT parse_threshold_kind(const std::string& s);

struct ThresholdParams {
  double T = 1.0;
  double omega = 0.0;
  double nu = 0.0;
  double b = 0.0;
};

struct ThresholdVerdict {
  double product = 0.0;
  double threshold = 0.0;
  ThresholdKindT kind = ThresholdKindT::free_4T;
  Classification classification = Classification::above_threshold;
};

/// 4T, 4 sin(wT)/w, 4 sinh(vT)/v, 4 sin(bT)/b; series near zero parameter.
/// Guards: wT < pi/2, vT < 1, bT < pi/2.
double threshold(ThresholdKindT kind, const ThresholdParams& p);

/// Compares sqrt(alpha^2 beta^2) with the threshold; at_threshold within 1e-12 relative.
ThresholdVerdict classify(double alpha_sq, double beta_sq, ThresholdKindT kind, const ThresholdParams& p);

inline constexpr double kAtThresholdTolerance = 1e-12;

}  // namespace gd
