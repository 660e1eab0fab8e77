#include "gaussdecay/fields.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gaussdecay/quadrature.hpp"

namespace gd {

ElectricPotential ElectricPotential::quadratic_only(double q) {
  ElectricPotential v;
  v.quadratic = [q](double) { return q; };
  return v;
}

Slice<cplx> ElectricPotential::potential_at(double t) const {
  Slice<cplx> v2s = v2 ? v2(t) : Slice<cplx>{};
  return [v1 = v1, v2s](const Point& x) {
    cplx out = v1 ? cplx(v1(x)) : cplx(0.0);
    if (v2s) out += v2s(x);
    return out;
  };
}

Slice<cplx> ElectricPotential::total_at(double t, int dim) const {
  const Slice<cplx> base = potential_at(t);
  const Point e_t = e(t, dim);
  const double k_t = k(t);
  const double q_t = q(t);
  return [base, e_t, k_t, q_t](const Point& x) {
    return base(x) + e_t.dot(x) + k_t + q_t * x.squaredNorm();
  };
}

MagneticPotential MagneticPotential::from_field(int dim, VectorField a_fn, MatrixField jac) {
  MagneticPotential m{dim};
  m.a = from_xt<Point>(std::move(a_fn));
  if (jac) m.jacobian = from_xt<Mat>(std::move(jac));
  return m;
}

Slice<Point> MagneticPotential::total_at(double t) const {
  Slice<Point> as = a ? a(t) : Slice<Point>{};
  const int n = dim;
  return [as, u = uniform, n](const Point& x) {
    Point out = as ? as(x) : Point(Point::Zero(n));
    if (u) out += 0.5 * (*u) * x;
    return out;
  };
}

Mat fd_jacobian(const Slice<Point>& a, const Point& x, double step) {
  const int n = static_cast<int>(x.size());
  Mat j(n, n);
  Point y = x;
  for (int c = 0; c < n; ++c) {
    y[c] = x[c] + 2 * step;
    const Point p2 = a(y);
    y[c] = x[c] + step;
    const Point p1 = a(y);
    y[c] = x[c] - step;
    const Point m1 = a(y);
    y[c] = x[c] - 2 * step;
    const Point m2 = a(y);
    y[c] = x[c];
    j.col(c) = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * step);
  }
  return j;
}

Slice<Mat> MagneticPotential::jacobian_at(double t) const {
  const int n = dim;
  Slice<Mat> base;
  if (jacobian) {
    base = jacobian(t);
  } else if (a) {
    Slice<Point> as = a(t);
    base = [as](const Point& x) { return fd_jacobian(as, x); };
  }
  return [base, u = uniform, n](const Point& x) {
    Mat j = base ? base(x) : Mat(Mat::Zero(n, n));
    if (u) j += 0.5 * (*u);
    return j;
  };
}

Slice<Mat> MagneticPotential::field_at(double t) const {
  Slice<Mat> j = jacobian_at(t);
  return [j](const Point& x) {
    const Mat d = j(x);
    return Mat(d.transpose() - d);
  };
}

MagneticSamples MagneticPotential::sample(const GridSpec& grid, double t) const {
  MagneticSamples s;
  if (is_zero()) return s;
  if (grid.dim != dim) throw DomainError("magnetic potential dimension does not match grid");
  const Slice<Point> at = total_at(t);
  const Slice<Mat> jt = jacobian_at(t);
  s.a.assign(dim, Eigen::ArrayXd(grid.size()));
  s.div.resize(grid.size());
  s.a2.resize(grid.size());
  for_each_point(grid, [&](Eigen::Index i, const Point& x) {
    const Point v = at(x);
    for (int d = 0; d < dim; ++d) s.a[d][i] = v[d];
    s.a2[i] = v.squaredNorm();
    s.div[i] = jt(x).trace();
  });
  s.sup_norm = std::sqrt(s.a2.maxCoeff());
  return s;
}

MagneticPotential make_uniform_magnetic(int n, double b, std::vector<std::pair<int, int>> pairing) {
  if (n < 2 || n % 2 != 0) {
    throw DomainError("no antisymmetric M with M^T M = b^2 Id in odd dimension (n=" + std::to_string(n) + ")");
  }
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("uniform magnetic strength must be > 0");
  if (pairing.empty()) {
    for (int i = 0; i < n; i += 2) pairing.emplace_back(i, i + 1);
  }
  std::set<int> seen;
  Mat m = Mat::Zero(n, n);
  for (auto [i, j] : pairing) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j || !seen.insert(i).second || !seen.insert(j).second) {
      throw DomainError("axis pairing must partition {0..n-1} into disjoint pairs");
    }
    m(i, j) = -b;
    m(j, i) = b;
  }
  if (static_cast<int>(seen.size()) != n) throw DomainError("axis pairing must cover every axis");
  MagneticPotential out{n};
  out.uniform = m;
  return out;
}

std::vector<PlaneRotation> rotation_planes(const Mat& m, double t) {
  const int n = static_cast<int>(m.rows());
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw DomainError("rotation generator must be antisymmetric (M^T = -M)");
  }
  std::vector<PlaneRotation> planes;
  std::vector<int> used(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (m(j, i) == 0.0) continue;
      if (used[i]++ || used[j]++) {
        throw DomainError("rotation generator is not block-aligned with the grid axes");
      }
      planes.push_back({i, j, m(j, i) * t});
    }
  }
  return planes;
}

GaugeResult cronstrom_gauge(const MagneticPotential& a, const GridSpec& grid, double t, double tol) {
  grid.validate();
  if (grid.dim != a.dim) throw DomainError("gauge: potential dimension does not match grid");
  const Slice<Point> at = a.total_at(t);
  const Slice<Mat> bt = a.field_at(t);
  GaugeResult g;
  g.psi = [bt](const Point& x) { return Point(bt(x).transpose() * x); };
  g.a_tilde = [psi = g.psi, tol](const Point& x) {
    return quad::integrate([&](double s) { return psi(Point(s * x)); }, 0.0, 1.0, tol, 0.1 * tol);
  };
  g.phi = [at, tol](const Point& x) {
    return quad::integrate([&](double s) { return x.dot(at(Point(s * x))); }, 0.0, 1.0, tol, 0.1 * tol);
  };
  g.a_tilde_samples.resize(grid.size(), grid.dim);
  for_each_point(grid, [&](Eigen::Index i, const Point& x) {
    const Point v = g.a_tilde(x);
    g.a_tilde_samples.row(i) = v.transpose();
    g.max_transversality = std::max(g.max_transversality, std::abs(x.dot(v)));
  });
  return g;
}

namespace {

// Sup over the outer shell (|x|_inf >= 0.9 L) against the sup inside |x|_inf <= L/2.
struct ShellSup {
  double inner = -std::numeric_limits<double>::infinity();
  double outer = -std::numeric_limits<double>::infinity();
  double all = -std::numeric_limits<double>::infinity();

  void add(const Point& x, double v, double half_width) {
    const double m = x.cwiseAbs().maxCoeff();
    all = std::max(all, v);
    if (m <= 0.5 * half_width) inner = std::max(inner, v);
    if (m >= 0.9 * half_width) outer = std::max(outer, v);
  }
};

constexpr double kGrowthTolerance = 1e-3;

bool bounded_linear(const ShellSup& s) {
  return s.outer <= (1.0 + kGrowthTolerance) * std::max(s.inner, 0.0) + 1e-300;
}

bool bounded_log(const ShellSup& s) {
  if (!std::isfinite(s.outer)) return true;
  return s.outer <= s.inner + std::log1p(kGrowthTolerance);
}

}  // namespace

HEReport validate_HE(const ElectricPotential& v, double alpha, double beta, double T, const GridSpec& grid,
                     int time_samples) {
  if (!(alpha > 0.0 && beta > 0.0 && T > 0.0)) throw DomainError("validate_HE needs alpha, beta, T > 0");
  grid.validate();
  HEReport r;
  if (v.v1) {
    ShellSup s;
    for_each_point(grid, [&](Eigen::Index, const Point& x) { s.add(x, std::abs(v.v1(x)), grid.half_width); });
    r.v1_sup = s.all;
    r.v1_bounded = bounded_linear(s);
  }
  if (v.v2) {
    ShellSup s;
    double im_sup = 0.0;
    const int steps = std::max(time_samples, 2);
    for (int i = 0; i < steps; ++i) {
      const double t = T * i / (steps - 1);
      const double denom = alpha * t + beta * (T - t);
      const double w = T * T / (denom * denom);
      const Slice<cplx> v2 = v.v2(t);
      for_each_point(grid, [&](Eigen::Index, const Point& x) {
        const cplx val = v2(x);
        im_sup = std::max(im_sup, std::abs(val.imag()));
        const double mag = std::abs(val);
        const double lv = mag > 0.0 ? std::log(mag) + w * x.squaredNorm() : -std::numeric_limits<double>::infinity();
        s.add(x, lv, grid.half_width);
      });
    }
    r.weighted_v2_log_sup = s.all;
    r.im_v2_sup = im_sup;
    r.weighted_bounded = bounded_log(s);
  }
  r.pass = r.v1_bounded && r.weighted_bounded;
  if (!r.v1_bounded) r.note += "V1 grows toward the boundary; ";
  if (!r.weighted_bounded) r.note += "weighted V2 grows toward the boundary; ";
  if (r.pass) r.note = "both (HE) suprema stable under box enlargement";
  return r;
}

HMReport validate_HM(const MagneticPotential& a, const GridSpec& grid, double t) {
  grid.validate();
  if (grid.dim != a.dim) throw DomainError("validate_HM: potential dimension does not match grid");
  HMReport r;
  const Slice<Mat> bt = a.field_at(t);
  ShellSup s;
  double xi_res = 0.0;
  Point xi;
  if (a.xi) {
    r.xi_declared = true;
    xi = *a.xi;
    if (xi.size() != a.dim || std::abs(xi.norm() - 1.0) > 1e-12) {
      throw DomainError("declared xi must be a unit vector of the potential's dimension");
    }
  }
  for_each_point(grid, [&](Eigen::Index, const Point& x) {
    const Mat b = bt(x);
    s.add(x, (b.transpose() * x).norm(), grid.half_width);
    r.field_sup = std::max(r.field_sup, b.cwiseAbs().maxCoeff());
    if (r.xi_declared) xi_res = std::max(xi_res, (b.transpose() * xi).norm());
  });
  r.psi_sup = s.all;
  r.psi_bounded = bounded_linear(s);
  r.xi_residual = xi_res;
  r.xi_ok = r.xi_declared && xi_res <= 1e-8 * std::max(1.0, r.field_sup);
  r.pass = r.psi_bounded && (!r.xi_declared || r.xi_ok);
  if (a.dim <= 2 && r.field_sup > 1e-12) {
    r.note += "xi condition cannot hold in dimensions 1, 2 with nonzero B; ";
  }
  if (!r.psi_bounded) r.note += "x^T B grows toward the boundary; ";
  r.note += "C^{1,eps} regularity of A is assumed, not checked";
  return r;
}

}  // namespace gd
