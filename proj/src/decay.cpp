#include "gaussdecay/decay.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gaussdecay/fft.hpp"

namespace gd {

namespace {

struct Shell {
  double r = 0.0;
  double log_rms = -std::numeric_limits<double>::infinity();
};

// Groups |v| by the integer key sum(m_d^2), m_d the signed lattice index, and
// returns the log RMS per shell. Squares are taken relative to the shell
// maximum so values down to the double range limit survive.
std::vector<Shell> lattice_shells(const GridSpec& g, const Eigen::ArrayXd& mag, double unit, bool frequency) {
  struct Acc {
    double top = 0.0;
    double scaled = 0.0;
    long count = 0;
  };
  std::map<long, Acc> acc;
  const int n = g.points;
  std::array<int, kMaxDim> idx{};
  const Eigen::Index total = g.size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    long key = 0;
    for (int d = g.dim - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % n);
      rem /= n;
      const long m = frequency ? (idx[d] < n / 2 ? idx[d] : idx[d] - n) : idx[d] - n / 2;
      key += m * m;
    }
    auto& slot = acc[key];
    const double v = mag[flat];
    if (v > slot.top) {
      const double q = slot.top / v;
      slot.scaled = slot.scaled * q * q + 1.0;
      slot.top = v;
    } else if (v > 0.0) {
      const double q = v / slot.top;
      slot.scaled += q * q;
    }
    slot.count += 1;
  }
  std::vector<Shell> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    out.push_back({unit * std::sqrt(static_cast<double>(key)),
                   a.top > 0.0 ? std::log(a.top) + 0.5 * std::log(a.scaled / static_cast<double>(a.count))
                               : -std::numeric_limits<double>::infinity()});
  }
  return out;
}

DecayReport fit_shells(const std::vector<Shell>& shells, double r_limit, const FitOptions& opt) {
  DecayReport rep;
  if (shells.empty()) return rep;
  const double log_floor = std::log(opt.absolute_floor);
  double r_min = opt.r_min;
  double r_max = opt.r_max;
  if (!(r_max > 0.0)) {
    std::size_t peak = 0;
    for (std::size_t i = 1; i < shells.size(); ++i) {
      if (shells[i].log_rms > shells[peak].log_rms) peak = i;
    }
    const double log_peak = shells[peak].log_rms;
    const double log_start = log_peak + std::log(opt.start_fraction);
    const double log_stop =
        std::max(log_floor, opt.relative_floor > 0.0 ? log_peak + std::log(opt.relative_floor) : log_floor);
    std::size_t i = peak;
    while (i < shells.size() && shells[i].log_rms >= log_start) ++i;
    if (opt.r_min > 0.0) {
      while (i < shells.size() && shells[i].r < opt.r_min) ++i;
    }
    r_min = i < shells.size() ? shells[i].r : r_limit;
    r_max = r_min;
    for (; i < shells.size() && shells[i].r <= r_limit; ++i) {
      if (shells[i].log_rms < log_stop) break;
      r_max = shells[i].r;
    }
  }
  rep.r_min = r_min;
  rep.r_max = r_max;

  std::vector<const Shell*> use;
  for (const auto& s : shells) {
    if (s.r < r_min || s.r > r_max || s.r <= 0.0) continue;
    if (!(s.log_rms > log_floor)) {
      rep.floor_hit = true;
      continue;
    }
    use.push_back(&s);
  }
  rep.shells_used = static_cast<int>(use.size());
  const int cols = opt.fixed_poly ? 2 : 3;
  if (rep.shells_used < cols + 3) return rep;

  Eigen::MatrixXd a(use.size(), cols);
  Eigen::VectorXd y(use.size());
  for (std::size_t i = 0; i < use.size(); ++i) {
    const double r = use[i]->r;
    a(i, 0) = 1.0;
    y[i] = use[i]->log_rms;
    if (opt.fixed_poly) {
      y[i] -= *opt.fixed_poly * std::log(r);
      a(i, 1) = r * r;
    } else {
      a(i, 1) = std::log(r);
      a(i, 2) = r * r;
    }
  }
  const auto qr = a.colPivHouseholderQr();
  const Eigen::VectorXd coef = qr.solve(y);
  rep.fit_residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(use.size()));
  rep.rate = -coef[cols - 1];
  rep.poly_correction = opt.fixed_poly ? *opt.fixed_poly : coef[1];
  rep.trusted = qr.rank() == cols && !rep.floor_hit && rep.fit_residual <= opt.residual_threshold;
  return rep;
}

}  // namespace

DecayReport fit_rate(const WaveField& u, const FitOptions& opt) {
  u.grid.validate();
  const auto shells = lattice_shells(u.grid, u.values.abs(), u.grid.spacing(), false);
  return fit_shells(shells, u.grid.half_width, opt);
}

DecayReport fourier_decay(const WaveField& u, FitOptions opt) {
  u.grid.validate();
  if (opt.relative_floor <= 0.0) opt.relative_floor = 1e-10;
  Eigen::ArrayXcd hat = u.values;
  Fft(u.grid).forward(hat);
  const auto shells = lattice_shells(u.grid, hat.abs(), pi / u.grid.half_width, true);
  return fit_shells(shells, u.grid.max_wavenumber(), opt);
}

double alpha_sq_from_fourier_rate(double rate) {
  if (!(rate > 0.0)) throw DomainError("Fourier rate must be positive");
  return 4.0 / rate;
}

WeightedNorm weighted_norm(const WaveField& u, double alpha_sq, double relative_floor) {
  if (!(alpha_sq > 0.0)) throw DomainError("weighted_norm needs alpha^2 > 0");
  if (!(relative_floor >= 0.0)) throw DomainError("weighted_norm needs a non-negative floor");
  const GridSpec& g = u.grid;
  const double dx = g.spacing();
  const int bins = static_cast<int>(std::ceil(g.half_width / dx)) + 1;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::ArrayXd lv(g.size());
  std::vector<double> bin_max(bins, neg_inf);
  std::vector<int> bin_of(g.size());
  const double cut = relative_floor * u.peak();
  double floor_r = 0.0;
  for_each_point(g, [&](Eigen::Index i, const Point& x) {
    const double m = std::abs(u.values[i]);
    const double r2 = x.squaredNorm();
    const bool keep = m > 0.0 && m >= cut;
    lv[i] = keep ? 2.0 * (std::log(m) + r2 / alpha_sq) : neg_inf;
    if (keep) floor_r = std::max(floor_r, std::sqrt(r2));
    const int b = static_cast<int>(std::sqrt(r2) / dx);
    bin_of[i] = b < bins ? b : -1;
    if (b < bins) bin_max[b] = std::max(bin_max[b], lv[i]);
  });
  const double top = lv.maxCoeff();
  WeightedNorm w;
  w.floor_radius = std::min(floor_r, g.half_width);
  if (top == neg_inf) return w;
  std::vector<double> bin_sum(bins, 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < lv.size(); ++i) {
    if (lv[i] == neg_inf) continue;
    total += std::exp(lv[i] - top);
    if (bin_of[i] >= 0) bin_sum[bin_of[i]] += std::exp(lv[i] - bin_max[bin_of[i]]);
  }
  w.log_value = 0.5 * (top + std::log(total) + std::log(g.cell_volume()));
  w.grid_value = std::exp(w.log_value);
  for (int b = 0; b < bins; ++b) {
    const double r = (b + 0.5) * dx;
    if (r > g.half_width) break;
    w.shell_radius.push_back(r);
    w.shell_log_contribution.push_back(bin_sum[b] > 0.0 ? bin_max[b] + std::log(bin_sum[b]) : neg_inf);
  }
  // Least-squares slope over the outer 10% of shells.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < w.shell_radius.size(); ++i) {
    const double r = w.shell_radius[i];
    const double c = w.shell_log_contribution[i];
    if (r < 0.9 * w.floor_radius || r > w.floor_radius || !std::isfinite(c)) continue;
    sx += r;
    sy += c;
    sxx += r * r;
    sxy += r * c;
    ++cnt;
  }
  if (cnt >= 3) {
    w.outer_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    w.divergent = w.outer_slope > -1e-9;
  }
  w.value = w.divergent ? std::numeric_limits<double>::infinity() : w.grid_value;
  return w;
}

std::string to_string(ThresholdKindT k) {
  switch (k) {
    case ThresholdKindT::free_4T:
      return "free_4T";
    case ThresholdKindT::harmonic_4sin:
      return "harmonic_4sin";
    case ThresholdKindT::repulsive_4sinh:
      return "repulsive_4sinh";
    case ThresholdKindT::magnetic_4sin:
      return "magnetic_4sin";
  }
  return "unknown";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::below_threshold:
      return "below_threshold";
    case Classification::at_threshold:
      return "at_threshold";
    case Classification::above_threshold:
      return "above_threshold";
  }
  return "unknown";
}

ThresholdKindT parse_threshold_kind(const std::string& s) {
  if (s == "free" || s == "free_4T") return ThresholdKindT::free_4T;
  if (s == "harmonic" || s == "harmonic_4sin") return ThresholdKindT::harmonic_4sin;
  if (s == "repulsive" || s == "repulsive_4sinh") return ThresholdKindT::repulsive_4sinh;
  if (s == "magnetic" || s == "magnetic_4sin") return ThresholdKindT::magnetic_4sin;
  throw DomainError("unknown threshold kind '" + s + "' (free, harmonic, repulsive, magnetic)");
}

namespace {

// sin(x)/x and sinh(x)/x with their series near zero.
double sinc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
  }
  return std::sin(x) / x;
}

double sinhc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double threshold(ThresholdKindT kind, const ThresholdParams& p) {
  if (!(p.T > 0.0)) throw DomainError("threshold needs T > 0");
  switch (kind) {
    case ThresholdKindT::free_4T:
      return 4.0 * p.T;
    case ThresholdKindT::harmonic_4sin:
      if (!(p.omega >= 0.0 && p.omega * p.T < 0.5 * pi)) {
        throw DomainError("harmonic threshold needs 0 < omega < pi/(2T); got omega*T=" + fmt(p.omega * p.T));
      }
      return 4.0 * p.T * sinc(p.omega * p.T);
    case ThresholdKindT::repulsive_4sinh:
      if (!(p.nu >= 0.0 && p.nu * p.T < 1.0)) {
        throw DomainError("repulsive threshold needs 0 < nu < 1/T; got nu*T=" + fmt(p.nu * p.T));
      }
      return 4.0 * p.T * sinhc(p.nu * p.T);
    case ThresholdKindT::magnetic_4sin:
      if (!(p.b >= 0.0 && p.b * p.T < 0.5 * pi)) {
        throw DomainError("magnetic threshold needs 0 < b < pi/(2T); got b*T=" + fmt(p.b * p.T));
      }
      return 4.0 * p.T * sinc(p.b * p.T);
  }
  return 0.0;
}

ThresholdVerdict classify(double alpha_sq, double beta_sq, ThresholdKindT kind, const ThresholdParams& p) {
  if (!(alpha_sq > 0.0 && beta_sq > 0.0)) throw DomainError("classify needs alpha^2, beta^2 > 0");
  ThresholdVerdict v;
  v.kind = kind;
  v.threshold = threshold(kind, p);
  v.product = std::sqrt(alpha_sq * beta_sq);
  const double rel = (v.product - v.threshold) / v.threshold;
  if (std::abs(rel) <= kAtThresholdTolerance) {
    v.classification = Classification::at_threshold;
  } else {
    v.classification = rel < 0 ? Classification::below_threshold : Classification::above_threshold;
  }
  return v;
}

}  // namespace gd
