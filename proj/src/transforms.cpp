#include "gaussdecay/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "gaussdecay/quadrature.hpp"

namespace gd {

namespace {

constexpr double kTimeQuadTol = 1e-12;

// Thread-safe memo for expensive time integrals, keyed by exact time value.
template <typename T>
class Memo {
 public:
  explicit Memo(std::function<T(double)> f) : f_(std::move(f)) {}
  T operator()(double t) {
    {
      std::lock_guard<std::mutex> lock(m_);
      if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    }
    T v = f_(t);
    std::lock_guard<std::mutex> lock(m_);
    if (cache_.size() > 4096) cache_.clear();
    cache_.emplace(t, v);
    return v;
  }

 private:
  std::function<T(double)> f_;
  std::mutex m_;
  std::map<double, T> cache_;
};

template <typename T>
std::function<T(double)> memoize(std::function<T(double)> f) {
  auto memo = std::make_shared<Memo<T>>(std::move(f));
  return [memo](double t) { return (*memo)(t); };
}

Slice<cplx> unit_weight() {
  return [](const Point&) { return cplx(1.0); };
}

AffineFrame identity_frame(int dim) {
  return {1.0, {}, Mat::Identity(dim, dim), Point::Zero(dim), unit_weight()};
}

RealFn identity_time() {
  return [](double t) { return t; };
}

nlohmann::json window_json(const TimeWindow& w) { return {w.lo, w.hi}; }

// Potential V(x, t) of an equation, without drives or quadratic part.
Slice<cplx> potential_slice(const EquationSpec& eq, double t) { return eq.electric.potential_at(t); }

}  // namespace

nlohmann::json TransformRecord::describe() const {
  return {{"name", name}, {"params", params}, {"dim", dim}, {"domain", window_json(domain)}, {"unitary", unitary}};
}

TimeWindow TransformChain::domain() const {
  if (records.empty()) return {-1e300, 1e300};
  return records.back().domain;
}

EquationSpec TransformChain::rewrite(const EquationSpec& eq) const {
  EquationSpec out = eq;
  for (const auto& r : records) {
    if (!r.rewrite) throw DomainError("transform '" + r.name + "' has no equation rewrite");
    out = r.rewrite(out);
  }
  return out;
}

nlohmann::json TransformChain::describe() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(r.describe());
  return arr;
}

TransformRecord phase_removal(RealFn k_fn, int dim, TimeWindow window) {
  if (!k_fn) k_fn = [](double) { return 0.0; };
  auto integral = memoize<double>([k_fn](double t) { return quad::integrate(k_fn, 0.0, t, kTimeQuadTol); });
  TransformRecord r;
  r.name = "phase_removal";
  r.dim = dim;
  r.source_time = identity_time();
  r.target_time = identity_time();
  r.domain = window;
  r.frame = [integral, dim](double t) {
    AffineFrame f = identity_frame(dim);
    const cplx w = std::exp(-I * integral(t));
    f.weight = [w](const Point&) { return w; };
    return f;
  };
  r.rewrite = [k_fn](const EquationSpec& eq) {
    EquationSpec out = eq;
    RealFn old = eq.electric.phase_drive;
    out.electric.phase_drive = [old, k_fn](double t) { return (old ? old(t) : 0.0) - k_fn(t); };
    out.electric.time_dependent = true;
    return out;
  };
  r.inverse_rewrite = [k_fn](const EquationSpec& eq) {
    EquationSpec out = eq;
    RealFn old = eq.electric.phase_drive;
    out.electric.phase_drive = [old, k_fn](double t) { return (old ? old(t) : 0.0) + k_fn(t); };
    out.electric.time_dependent = true;
    return out;
  };
  return r;
}

namespace {

// Rewrite under x -> x + S(t) with the Galilean weight.
EquationSpec galilean_rewrite(const EquationSpec& eq, const Path& p) {
  EquationSpec out = eq;
  const int n = eq.dim;
  const EquationSpec in = eq;
  MagneticPotential mag{n};
  mag.uniform = in.magnetic.uniform;
  mag.xi = in.magnetic.xi;
  mag.time_dependent = true;
  if (in.magnetic.a || in.magnetic.uniform) {
    mag.a = [in, p, n](double t) {
      const Point s = p.s(t);
      const Slice<Point> at = in.magnetic.a ? in.magnetic.a(t) : Slice<Point>{};
      Point ms = in.magnetic.uniform ? Point(0.5 * (*in.magnetic.uniform) * s) : Point(Point::Zero(n));
      return Slice<Point>([at, s, ms](const Point& x) {
        Point v = ms;
        if (at) v += at(Point(x + s));
        return v;
      });
    };
    if (in.magnetic.a) {
      mag.jacobian = [in, p, n](double t) {
        const Point s = p.s(t);
        const Slice<Mat> jt = in.magnetic.jacobian_at(t);
        const Mat half_m = in.magnetic.uniform ? Mat(0.5 * (*in.magnetic.uniform)) : Mat(Mat::Zero(n, n));
        return Slice<Mat>([jt, s, half_m](const Point& x) { return Mat(jt(Point(x + s)) - half_m); });
      };
    }
  }
  out.magnetic = mag;
  out.electric = ElectricPotential{};
  out.electric.time_dependent = true;
  out.electric.phase_drive = in.electric.phase_drive;
  out.electric.quadratic = in.electric.quadratic;
  out.electric.e_drive = [in, p, n](double t) { return Point(in.electric.e(t, n) + 0.5 * p.s_ddot(t)); };
  out.electric.v2 = [in, p, mag, n](double t) {
    const Point s = p.s(t);
    const Point sd = p.s_dot(t);
    const double q = in.electric.q(t);
    const Slice<cplx> v = potential_slice(in, t);
    const Slice<Point> at = mag.is_zero() ? Slice<Point>{} : mag.total_at(t);
    return Slice<cplx>([v, at, s, sd, q](const Point& x) {
      const Point y = x + s;
      cplx out = v(y) + q * (y.squaredNorm() - x.squaredNorm());
      if (at) out += sd.dot(at(x));
      return out;
    });
  };
  return out;
}

}  // namespace

TransformRecord galilean(VectorFn e_fn, Path path, int dim, TimeWindow window) {
  if (!path.s || !path.s_dot || !path.s_ddot) throw DomainError("galilean: path needs S, S' and S''");
  if (!e_fn) e_fn = [dim](double) { return Point(Point::Zero(dim)); };
  auto gamma = memoize<double>([e_fn, path](double t) {
    return quad::integrate(
        [&](double tau) {
          const Point sd = path.s_dot(tau);
          return 0.25 * sd.squaredNorm() - e_fn(tau).dot(path.s(tau));
        },
        0.0, t, kTimeQuadTol);
  });
  TransformRecord r;
  r.name = "galilean";
  r.dim = dim;
  r.source_time = identity_time();
  r.target_time = identity_time();
  r.domain = window;
  r.frame = [path, gamma, dim](double t) {
    AffineFrame f = identity_frame(dim);
    f.shift = path.s(t);
    const Point sd = path.s_dot(t);
    const double g = gamma(t);
    f.weight = [sd, g](const Point& x) { return std::exp(I * (0.5 * sd.dot(x) + g)); };
    return f;
  };
  r.rewrite = [path](const EquationSpec& eq) { return galilean_rewrite(eq, path); };
  return r;
}

Path electric_path(VectorFn e_fn, double T, int dim) {
  if (!(T > 0.0)) throw DomainError("electric_removal needs T > 0");
  if (!e_fn) e_fn = [dim](double) { return Point(Point::Zero(dim)); };
  const Point c = quad::integrate([&](double s) { return Point((T - s) * e_fn(s)); }, 0.0, T, kTimeQuadTol);
  Path p;
  p.s = memoize<Point>([e_fn, c, T](double t) {
    const Point inner = quad::integrate([&](double s) { return Point((t - s) * e_fn(s)); }, 0.0, t, kTimeQuadTol);
    return Point(-2.0 * (inner - (t / T) * c));
  });
  p.s_dot = memoize<Point>([e_fn, c, T](double t) {
    const Point inner = quad::integrate([&](double s) { return e_fn(s); }, 0.0, t, kTimeQuadTol);
    return Point(-2.0 * (inner - c / T));
  });
  p.s_ddot = [e_fn](double t) { return Point(-2.0 * e_fn(t)); };
  return p;
}

TransformRecord electric_removal(VectorFn e_fn, double T, int dim, RealFn k_fn) {
  const Path p = electric_path(e_fn, T, dim);
  TransformRecord r = galilean(e_fn, p, dim, {0.0, T});
  r.name = "electric_removal";
  r.params = {{"T", T}};
  if (k_fn) {
    const TransformRecord ph = phase_removal(k_fn, dim, {0.0, T});
    auto base_frame = r.frame;
    auto phase_frame = ph.frame;
    r.frame = [base_frame, phase_frame](double t) {
      AffineFrame f = base_frame(t);
      const cplx extra = phase_frame(t).weight(Point::Zero(f.shift.size()));
      auto w = f.weight;
      f.weight = [w, extra](const Point& x) { return w(x) * extra; };
      return f;
    };
    auto base_rewrite = r.rewrite;
    auto phase_rewrite = ph.rewrite;
    r.rewrite = [base_rewrite, phase_rewrite](const EquationSpec& eq) { return phase_rewrite(base_rewrite(eq)); };
  }
  return r;
}

namespace {

// Comoving rewrite; q_new overrides q(tau)/a^4 - a''/(4a) when given.
EquationRewrite comoving_rewrite(Scale sc, RealFn tau_of, std::function<double(double, double)> q_new) {
  return [sc, tau_of, q_new](const EquationSpec& in) {
    const int n = in.dim;
    EquationSpec out = in;
    MagneticPotential mag{n};
    mag.time_dependent = true;
    mag.xi = in.magnetic.xi;
    if (!in.magnetic.is_zero()) {
      mag.a = [in, sc, tau_of](double s) {
        const double a = sc.a(s);
        const Slice<Point> at = in.magnetic.total_at(tau_of(s));
        return Slice<Point>([at, a](const Point& x) { return Point(at(Point(x / a)) / a); });
      };
      mag.jacobian = [in, sc, tau_of](double s) {
        const double a = sc.a(s);
        const Slice<Mat> jt = in.magnetic.jacobian_at(tau_of(s));
        return Slice<Mat>([jt, a](const Point& x) { return Mat(jt(Point(x / a)) / (a * a)); });
      };
    }
    out.magnetic = mag;
    ElectricPotential el;
    el.time_dependent = true;
    el.e_drive = [in, sc, tau_of, n](double s) {
      const double a = sc.a(s);
      return Point(in.electric.e(tau_of(s), n) / (a * a * a));
    };
    el.phase_drive = [in, sc, tau_of](double s) {
      const double a = sc.a(s);
      return in.electric.k(tau_of(s)) / (a * a);
    };
    el.quadratic = [in, sc, tau_of, q_new](double s) {
      const double a = sc.a(s);
      const double q = in.electric.q(tau_of(s));
      if (q_new) return q_new(q, s);
      return q / (a * a * a * a) - sc.a_ddot(s) / (4.0 * a);
    };
    el.v2 = [in, sc, tau_of, mag](double s) {
      const double a = sc.a(s);
      const double drift = sc.a_dot(s) / a;
      const Slice<cplx> v = potential_slice(in, tau_of(s));
      const Slice<Point> at = mag.is_zero() ? Slice<Point>{} : mag.total_at(s);
      return Slice<cplx>([v, at, a, drift](const Point& x) {
        cplx out = v(Point(x / a)) / (a * a);
        if (at) out -= drift * x.dot(at(x));
        return out;
      });
    };
    out.electric = el;
    return out;
  };
}

AffineFrame comoving_frame(const Scale& sc, int dim, double t) {
  AffineFrame f = identity_frame(dim);
  const double a = sc.a(t);
  if (!(a > 0.0)) throw DomainError("comoving scale a(t) must stay positive");
  f.scale = 1.0 / a;
  const double amp = std::pow(a, -0.5 * dim);
  const double chirp = -sc.a_dot(t) / (4.0 * a);
  f.weight = [amp, chirp](const Point& x) { return amp * std::exp(I * (chirp * x.squaredNorm())); };
  return f;
}

}  // namespace

TransformRecord comoving(Scale sc, int dim, TimeWindow window) {
  if (!sc.a || !sc.a_dot || !sc.a_ddot) throw DomainError("comoving: scale needs a, a' and a''");
  auto tau = memoize<double>([sc](double t) {
    return quad::integrate([&](double s) { return 1.0 / (sc.a(s) * sc.a(s)); }, 0.0, t, kTimeQuadTol);
  });
  TransformRecord r;
  r.name = "comoving";
  r.dim = dim;
  r.domain = window;
  r.source_time = tau;
  r.target_time = [tau, sc](double target) {
    double t = target;
    for (int it = 0; it < 60; ++it) {
      const double a = sc.a(t);
      const double step = (tau(t) - target) * a * a;
      t -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) return t;
    }
    throw ConvergenceError("comoving: time map inversion did not converge");
  };
  r.frame = [sc, dim](double t) { return comoving_frame(sc, dim, t); };
  r.rewrite = comoving_rewrite(sc, tau, {});
  return r;
}

TransformRecord harmonic_removal(double omega, double T, int dim) {
  if (!(omega > 0.0) || !(T > 0.0)) throw DomainError("harmonic_removal needs omega > 0 and T > 0");
  if (!(omega * T < 0.5 * pi)) {
    throw DomainError("harmonic_removal needs 0 < omega < pi/(2T), got omega*T=" + short_num(omega * T));
  }
  const double w = omega;
  Scale sc{[w](double t) { return std::sqrt(1.0 + w * w * t * t); },
           [w](double t) { return w * w * t / std::sqrt(1.0 + w * w * t * t); },
           [w](double t) { return w * w / std::pow(1.0 + w * w * t * t, 1.5); }};
  TransformRecord r;
  r.name = "harmonic_removal";
  r.params = {{"omega", omega}, {"T", T}};
  r.dim = dim;
  r.source_time = [w](double t) { return std::atan(w * t) / w; };
  r.target_time = [w](double tau) { return std::tan(w * tau) / w; };
  r.domain = {0.0, std::tan(w * T) / w};
  r.frame = [sc, dim](double t) { return comoving_frame(sc, dim, t); };
  r.rewrite = comoving_rewrite(sc, r.source_time, [w](double q, double t) {
    const double a2 = 1.0 + w * w * t * t;
    return (q - 0.25 * w * w) / (a2 * a2);
  });
  return r;
}

TransformRecord repulsive_removal(double nu, double T, int dim) {
  if (!(nu > 0.0) || !(T > 0.0)) throw DomainError("repulsive_removal needs nu > 0 and T > 0");
  if (!(nu * T < 1.0)) {
    throw DomainError("repulsive_removal needs 0 < nu < 1/T, got nu*T=" + short_num(nu * T));
  }
  const double v = nu;
  Scale sc{[v](double t) { return std::sqrt(1.0 - v * v * t * t); },
           [v](double t) { return -v * v * t / std::sqrt(1.0 - v * v * t * t); },
           [v](double t) { return -v * v / std::pow(1.0 - v * v * t * t, 1.5); }};
  TransformRecord r;
  r.name = "repulsive_removal";
  r.params = {{"nu", nu}, {"T", T}};
  r.dim = dim;
  r.source_time = [v](double t) { return std::atanh(v * t) / v; };
  r.target_time = [v](double tau) { return std::tanh(v * tau) / v; };
  r.domain = {0.0, std::tanh(v * T) / v};
  r.frame = [sc, dim](double t) { return comoving_frame(sc, dim, t); };
  r.rewrite = comoving_rewrite(sc, r.source_time, [v](double q, double t) {
    const double a2 = 1.0 - v * v * t * t;
    return (q + 0.25 * v * v) / (a2 * a2);
  });
  return r;
}

TransformRecord rotating_frame(const Mat& m, TimeWindow window) {
  const int dim = static_cast<int>(m.rows());
  if (m.rows() != m.cols()) throw DomainError("rotating_frame: M must be square");
  rotation_planes(m, 0.0);  // validates antisymmetry and axis alignment
  TransformRecord r;
  r.name = "rotating_frame";
  r.params = {{"M", std::vector<std::vector<double>>()}};
  for (int i = 0; i < dim; ++i) {
    std::vector<double> row(dim);
    for (int j = 0; j < dim; ++j) row[j] = m(i, j);
    r.params["M"].push_back(row);
  }
  r.dim = dim;
  r.source_time = identity_time();
  r.target_time = identity_time();
  r.domain = window;
  r.frame = [m, dim](double t) {
    AffineFrame f = identity_frame(dim);
    f.planes = rotation_planes(m, t);
    f.rotation = rotation_matrix(dim, f.planes);
    return f;
  };
  const Mat mtm = m.transpose() * m;
  const double b2 = mtm.trace() / dim;
  const bool isotropic = (mtm - b2 * Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, b2);
  r.rewrite = [m, dim, b2, isotropic](const EquationSpec& in) {
    if (!in.magnetic.uniform || ((*in.magnetic.uniform) - m).cwiseAbs().maxCoeff() > 1e-14) {
      throw DomainError("rotating_frame: equation's uniform magnetic part must equal M x / 2");
    }
    auto rot = [m, dim](double t) { return rotation_matrix(dim, rotation_planes(m, t)); };
    EquationSpec out = in;
    MagneticPotential mag{dim};
    mag.time_dependent = true;
    mag.xi = in.magnetic.xi;
    if (in.magnetic.a) {
      mag.a = [in, rot](double t) {
        const Mat r = rot(t);
        const Slice<Point> at = in.magnetic.a(t);
        return Slice<Point>([at, r](const Point& x) { return Point(r.transpose() * at(Point(r * x))); });
      };
      if (in.magnetic.jacobian) {
        mag.jacobian = [in, rot](double t) {
          const Mat r = rot(t);
          const Slice<Mat> jt = in.magnetic.jacobian(t);
          return Slice<Mat>([jt, r](const Point& x) { return Mat(r.transpose() * jt(Point(r * x)) * r); });
        };
      }
    }
    out.magnetic = mag;
    ElectricPotential el;
    el.time_dependent = true;
    el.phase_drive = in.electric.phase_drive;
    el.e_drive = [in, rot, dim](double t) { return Point(rot(t).transpose() * in.electric.e(t, dim)); };
    el.quadratic = [in, b2, isotropic](double t) { return in.electric.q(t) + (isotropic ? 0.25 * b2 : 0.0); };
    el.v2 = [in, rot, mag, m, isotropic](double t) {
      const Mat r = rot(t);
      const Slice<cplx> v = potential_slice(in, t);
      const Slice<Point> at = mag.a ? mag.a(t) : Slice<Point>{};
      return Slice<cplx>([v, at, r, m, isotropic](const Point& x) {
        const Point mx = m * x;
        cplx out = v(Point(r * x));
        if (at) out += mx.dot(at(x));
        if (!isotropic) out += 0.25 * mx.squaredNorm();
        return out;
      });
    };
    out.electric = el;
    return out;
  };
  return r;
}

TransformRecord inverse(const TransformRecord& r) {
  TransformRecord inv;
  inv.name = "inverse(" + r.name + ")";
  inv.params = r.params;
  inv.dim = r.dim;
  inv.source_time = r.target_time;
  inv.target_time = r.source_time;
  const double a = r.source_time(r.domain.lo);
  const double b = r.source_time(r.domain.hi);
  inv.domain = {std::min(a, b), std::max(a, b)};
  inv.unitary = r.unitary;
  inv.rewrite = r.inverse_rewrite;
  inv.inverse_rewrite = r.rewrite;
  auto frame = r.frame;
  auto target = r.target_time;
  inv.frame = [frame, target](double tau) {
    const AffineFrame f = frame(target(tau));
    AffineFrame g;
    g.scale = 1.0 / f.scale;
    for (auto it = f.planes.rbegin(); it != f.planes.rend(); ++it) g.planes.push_back({it->i, it->j, -it->angle});
    g.rotation = f.rotation.transpose();
    g.shift = -(f.rotation.transpose() * f.shift) / f.scale;
    g.weight = [f](const Point& y) {
      return 1.0 / f.weight(Point(f.rotation.transpose() * (y - f.shift) / f.scale));
    };
    return g;
  };
  return inv;
}

TransformChain inverse(const TransformChain& c) {
  TransformChain out;
  for (auto it = c.records.rbegin(); it != c.records.rend(); ++it) out.records.push_back(inverse(*it));
  return out;
}

ApplyReport apply_with_report(const TransformRecord& r, const WaveField& u) {
  if (u.grid.dim != r.dim) throw DomainError("transform '" + r.name + "' dimension does not match field");
  const double t = r.target_time(u.time);
  if (!r.domain.contains(t)) {
    throw DomainError("transform '" + r.name + "': time " + short_num(t) + " outside [" +
                      short_num(r.domain.lo) + ", " + short_num(r.domain.hi) + "]");
  }
  const AffineFrame f = r.frame(t);
  const double L = u.grid.half_width;
  double lost = 0.0;
  double total = 0.0;
  const Mat rt = f.rotation.transpose();
  for_each_point(u.grid, [&](Eigen::Index i, const Point& y) {
    const double m2 = std::norm(u.values[i]);
    total += m2;
    const Point x = rt * (y - f.shift) / f.scale;
    if (x.cwiseAbs().maxCoeff() > L) lost += m2;
  });
  ApplyReport rep;
  rep.lost_fraction = total > 0.0 ? lost / total : 0.0;
  rep.field = resample_affine(u, f.scale, f.planes, f.shift);
  for_each_point(u.grid, [&](Eigen::Index i, const Point& x) { rep.field.values[i] *= f.weight(x); });
  rep.field.time = t;
  return rep;
}

WaveField apply(const TransformRecord& r, const WaveField& u, double tolerance) {
  ApplyReport rep = apply_with_report(r, u);
  if (rep.lost_fraction > tolerance) {
    throw GridError("transform '" + r.name + "' pushes " + short_num(rep.lost_fraction) +
                    " of the mass outside the grid (tolerance " + short_num(tolerance) + ")");
  }
  return std::move(rep.field);
}

WaveField apply(const TransformChain& c, const WaveField& u, double tolerance) {
  WaveField out = u;
  for (const auto& r : c.records) out = apply(r, out, tolerance);
  return out;
}

}  // namespace gd
