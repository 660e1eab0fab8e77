#include "gaussdecay/interp.hpp"

#include <cmath>

#include "gaussdecay/fft.hpp"

namespace gd {

namespace {

Eigen::Index stride_of(const GridSpec& g, int d) {
  Eigen::Index s = 1;
  for (int e = g.dim - 1; e > d; --e) s *= g.points;
  return s;
}

// Calls fn(base, stride) for every grid line running along axis d.
template <typename Fn>
void for_each_line(const GridSpec& g, int d, Fn&& fn) {
  const Eigen::Index stride = stride_of(g, d);
  const Eigen::Index outer = g.size() / (stride * g.points);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index in = 0; in < stride; ++in) fn(o * stride * g.points + in, stride);
  }
}

// Shift every line along axis d by amount(base): v(x) = u(x + amount e_d).
template <typename Amount>
void shift_lines(WaveField& u, int d, Amount&& amount) {
  const GridSpec& g = u.grid;
  const GridSpec line{1, g.half_width, g.points};
  const Fft fft(line);
  const Eigen::ArrayXd k = line.wavenumbers();
  const int nyq = g.points / 2;
  Eigen::ArrayXcd buf(g.points);
  for_each_line(g, d, [&](Eigen::Index base, Eigen::Index stride) {
    const double s = amount(base);
    if (s == 0.0) return;
    for (int m = 0; m < g.points; ++m) buf[m] = u.values[base + m * stride];
    fft.forward(buf);
    for (int m = 0; m < g.points; ++m) {
      buf[m] *= (m == nyq) ? cplx(std::cos(k[m] * s), 0.0) : std::exp(I * (k[m] * s));
    }
    fft.inverse(buf);
    for (int m = 0; m < g.points; ++m) u.values[base + m * stride] = buf[m];
  });
}

double coordinate_of(const GridSpec& g, Eigen::Index flat, int d) {
  return -g.half_width + g.spacing() * static_cast<double>((flat / stride_of(g, d)) % g.points);
}

void half_turn(WaveField& u, int i, int j) {
  const GridSpec& g = u.grid;
  const Eigen::ArrayXcd src = u.values;
  const Eigen::Index si = stride_of(g, i);
  const Eigen::Index sj = stride_of(g, j);
  const int n = g.points;
  for (Eigen::Index flat = 0; flat < g.size(); ++flat) {
    const Eigen::Index a = (flat / si) % n;
    const Eigen::Index b = (flat / sj) % n;
    const Eigen::Index a2 = (n - a) % n;
    const Eigen::Index b2 = (n - b) % n;
    u.values[flat] = src[flat + (a2 - a) * si + (b2 - b) * sj];
  }
}

double dirichlet(double theta, int n) {
  const double half = 0.5 * theta;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-14) return 1.0;
  return std::sin(n * half) * std::cos(half) / (s * n);
}

}  // namespace

Mat rotation_matrix(int dim, const std::vector<PlaneRotation>& planes) {
  Mat r = Mat::Identity(dim, dim);
  for (const auto& p : planes) {
    Mat q = Mat::Identity(dim, dim);
    const double c = std::cos(p.angle);
    const double s = std::sin(p.angle);
    q(p.i, p.i) = c;
    q(p.i, p.j) = -s;
    q(p.j, p.i) = s;
    q(p.j, p.j) = c;
    r = r * q;
  }
  return r;
}

WaveField fourier_shift(const WaveField& u, const Point& s) {
  if (s.size() != u.grid.dim) throw DomainError("shift dimension does not match grid");
  WaveField out = u;
  for (int d = 0; d < u.grid.dim; ++d) {
    if (s[d] == 0.0) continue;
    shift_lines(out, d, [&](Eigen::Index) { return s[d]; });
  }
  return out;
}

WaveField rotate(const WaveField& u, const std::vector<PlaneRotation>& planes) {
  WaveField out = u;
  const GridSpec& g = u.grid;
  for (const auto& p : planes) {
    if (p.i == p.j || p.i < 0 || p.j < 0 || p.i >= g.dim || p.j >= g.dim) {
      throw DomainError("rotation plane axes out of range");
    }
    double theta = std::remainder(p.angle, 2.0 * pi);
    if (theta == 0.0) continue;
    if (std::abs(theta) > 0.5 * pi) {
      half_turn(out, p.i, p.j);
      theta = theta > 0 ? theta - pi : theta + pi;
    }
    const double a = -std::tan(0.5 * theta);
    const double b = std::sin(theta);
    // R = Sx(a) Sy(b) Sx(a); pull-backs are applied left to right.
    shift_lines(out, p.i, [&](Eigen::Index base) { return a * coordinate_of(g, base, p.j); });
    shift_lines(out, p.j, [&](Eigen::Index base) { return b * coordinate_of(g, base, p.i); });
    shift_lines(out, p.i, [&](Eigen::Index base) { return a * coordinate_of(g, base, p.j); });
  }
  return out;
}

WaveField dilate(const WaveField& u, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("dilation factor must be positive");
  if (lambda == 1.0) return u;
  const GridSpec& g = u.grid;
  const int n = g.points;
  const double L = g.half_width;
  const Eigen::ArrayXd x = g.axis();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double y = lambda * x[j];
    if (y < -L || y >= L) continue;
    for (int m = 0; m < n; ++m) kernel(j, m) = dirichlet(pi * (y - x[m]) / L, n);
  }
  const Eigen::MatrixXcd kc = kernel.cast<cplx>();
  WaveField out = u;
  Eigen::VectorXcd buf(n);
  for (int d = 0; d < g.dim; ++d) {
    for_each_line(g, d, [&](Eigen::Index base, Eigen::Index stride) {
      for (int m = 0; m < n; ++m) buf[m] = out.values[base + m * stride];
      const Eigen::VectorXcd res = kc * buf;
      for (int m = 0; m < n; ++m) out.values[base + m * stride] = res[m];
    });
  }
  return out;
}

WaveField resample_affine(const WaveField& u, double lambda, const std::vector<PlaneRotation>& planes,
                          const Point& s) {
  WaveField out = u;
  bool moved = false;
  for (int d = 0; d < s.size(); ++d) moved = moved || s[d] != 0.0;
  if (moved) out = fourier_shift(out, s);
  if (!planes.empty()) out = rotate(out, planes);
  return dilate(out, lambda);
}

}  // namespace gd
