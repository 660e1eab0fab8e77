#include <doctest.h>

#include <cmath>

#include "gaussdecay/decay.hpp"
#include "gaussdecay/engine.hpp"
#include "gaussdecay/specfun.hpp"
#include "gaussdecay/transforms.hpp"

using namespace gd;

namespace {

const GridSpec kLine{1, 20.0, 1024};
const GridSpec kPlane{2, 12.0, 256};

// phi(x, t) = w(x) u(lambda R x + S, g(t)) for the frame of r at t.
ComplexField pulled(const TransformRecord& r, ComplexField u) {
  return [r, u](const Point& x, double t) {
    const AffineFrame f = r.frame(t);
    const Point y = f.scale * (f.rotation * x) + f.shift;
    return f.weight(x) * u(y, r.source_time(t));
  };
}

ComplexField gaussian(GaussianSolution g) {
  return [g](const Point& x, double t) { return g.value(x, t); };
}

WaveField bump_1d(double t = 0.0) {
  return sample(
      kLine, [](const Point& x) { return std::exp(-(x[0] - 1) * (x[0] - 1)) * std::exp(I * 0.5 * x[0]); }, t);
}

WaveField bump_2d(double t = 0.0) {
  return sample(
      kPlane,
      [](const Point& x) {
        return std::exp(-(x[0] - 1) * (x[0] - 1) - 0.5 * x[1] * x[1]) * std::exp(I * 0.3 * x[1]);
      },
      t);
}

VectorFn constant_drive(double e0) {
  return [e0](double) {
    Point e(1);
    e << e0;
    return e;
  };
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("phase removal weights") {
    const auto zero = phase_removal([](double) { return 0.0; }, 1);
    CHECK(zero.frame(0.7).weight(Point::Zero(1)) == cplx(1.0, 0.0));
    const double c = 1.3;
    const auto r = phase_removal([c](double) { return c; }, 1);
    for (double t : {0.0, 0.4, 2.0}) {
      const cplx w = r.frame(t).weight(Point::Zero(1));
      CHECK(std::abs(w - std::exp(-I * c * t)) < 1e-13);
      CHECK(std::abs(w) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("phase removal sign") {
    const double c = 1.3;
    EquationSpec eq = free_equation(1, 1.0);
    eq.electric.phase_drive = [c](double) { return c; };
    const GaussianSolution g{1, cplx(1.0, 0.0), GaussianSolution::Kind::free, 0.0};
    const ComplexField u = [g, c](const Point& x, double t) { return std::exp(I * c * t) * g.value(x, t); };
    CHECK(residual(u, eq, kLine, 0.4) < 1e-8);
    const auto r = phase_removal([c](double) { return c; }, 1);
    const auto neq = r.rewrite(eq);
    CHECK(residual(pulled(r, u), neq, kLine, 0.4) < 1e-8);
    // the opposite multiplier leaves the phase drive behind
    const ComplexField wrong = [u, c](const Point& x, double t) { return std::exp(I * c * t) * u(x, t); };
    CHECK(residual(wrong, neq, kLine, 0.4) > 1e-2);
  }

  TEST_CASE("galilean transform of a free Gaussian") {
    const Path p{[](double t) {
                   Point s(1);
                   s << 0.3 * t * t;
                   return s;
                 },
                 [](double t) {
                   Point s(1);
                   s << 0.6 * t;
                   return s;
                 },
                 [](double) {
                   Point s(1);
                   s << 0.6;
                   return s;
                 }};
    const auto r = galilean(constant_drive(0.0), p, 1);
    const auto neq = r.rewrite(free_equation(1, 1.0));
    CHECK(neq.electric.e(0.3, 1)[0] == doctest::Approx(0.3));
    const GaussianSolution g{1, cplx(0.7, 0.2), GaussianSolution::Kind::free, 0.0};
    CHECK(residual(pulled(r, gaussian(g)), neq, kLine, 0.5) < 1e-6);

    const Path still{[](double) { return Point(Point::Zero(1)); }, [](double) { return Point(Point::Zero(1)); },
                     [](double) { return Point(Point::Zero(1)); }};
    const auto id = galilean(constant_drive(0.0), still, 1);
    const auto u = bump_1d(0.3);
    CHECK(max_abs_difference(apply(id, u), u) < 1e-14);
  }

  TEST_CASE("electric path") {
    const double T = 2.0;
    const double e0 = 0.8;
    const auto p = electric_path(constant_drive(e0), T, 1);
    for (double t : {0.0, 0.5, 1.3, 2.0}) {
      CHECK(p.s(t)[0] == doctest::Approx(-e0 * t * (t - T)).epsilon(1e-12).scale(1.0));
      CHECK(e0 + 0.5 * p.s_ddot(t)[0] == doctest::Approx(0.0).scale(1.0));
    }
    const auto r = electric_removal(constant_drive(e0), T, 1);
    CHECK(r.rewrite(electric_equation(1, constant_drive(e0), T)).electric.e(0.7, 1)[0] ==
          doctest::Approx(0.0).scale(1.0));
    const auto u = bump_1d(0.0);
    const auto phi = apply(r, u);
    CHECK((phi.values.abs() - u.values.abs()).abs().maxCoeff() < 1e-13);

    const auto zero = electric_removal(constant_drive(0.0), T, 1);
    CHECK(max_abs_difference(apply(zero, bump_1d(0.9)), bump_1d(0.9)) < 1e-14);
  }

  TEST_CASE("comoving frame") {
    const Scale sc{[](double t) { return 1.0 + 0.2 * t * t; }, [](double t) { return 0.4 * t; },
                   [](double) { return 0.4; }};
    const auto r = comoving(sc, 1, {0.0, 1.0});
    const GaussianSolution g{1, cplx(0.5, 0.1), GaussianSolution::Kind::free, 0.0};
    const auto neq = r.rewrite(free_equation(1, 1.0));
    CHECK(residual(pulled(r, gaussian(g)), neq, kLine, 0.6) < 1e-6);
    const auto u = g.sample(kLine, r.source_time(0.6));
    CHECK(apply(r, u).norm() == doctest::Approx(u.norm()).epsilon(1e-12));

    const Scale one{[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    const auto id = comoving(one, 1, {0.0, 1.0});
    CHECK(max_abs_difference(apply(id, bump_1d(0.5)), bump_1d(0.5)) < 1e-13);
  }

  TEST_CASE("harmonic removal") {
    const double w = 1.0, T = 0.5;
    const auto r = harmonic_removal(w, T, 1);
    CHECK(max_abs_difference(apply(r, bump_1d(0.0)), bump_1d(0.0)) < 1e-13);
    CHECK(r.domain.hi == doctest::Approx(std::tan(w * T) / w));
    const auto neq = r.rewrite(harmonic_equation(1, w, T));
    CHECK(neq.electric.q(0.3) == doctest::Approx(0.0).scale(1.0));
    const GaussianSolution g{1, cplx(0.4, -0.2), GaussianSolution::Kind::harmonic, w};
    CHECK(residual(pulled(r, gaussian(g)), neq, kLine, 0.3) < 1e-6);
    // standing wave
    const auto psi = qho_eigenfunction(0, w, kLine);
    const double e0 = psi.entry.energy;
    const ComplexField sw = [e0, w](const Point& x, double t) {
      return std::exp(I * e0 * t) * qho_value(0, w, x[0]);
    };
    CHECK(residual(pulled(r, sw), neq, kLine, 0.3) < 1e-6);

    CHECK_THROWS_AS(harmonic_removal(1.0, 2.0, 1), DomainError);
    CHECK_THROWS_AS(apply(r, bump_1d(0.6)), DomainError);
  }

  TEST_CASE("repulsive removal") {
    const double v = 0.5, T = 0.5;
    const auto r = repulsive_removal(v, T, 1);
    CHECK(max_abs_difference(apply(r, bump_1d(0.0)), bump_1d(0.0)) < 1e-13);
    CHECK(r.domain.hi == doctest::Approx(std::tanh(v * T) / v));
    const auto u = bump_1d(0.4);
    CHECK(max_abs_difference(apply(inverse(r), apply(r, u)), u) < 1e-10);
    const GaussianSolution g{1, cplx(0.4, -0.2), GaussianSolution::Kind::repulsive, v};
    const auto neq = r.rewrite(repulsive_equation(1, v, T));
    CHECK(residual(pulled(r, gaussian(g)), neq, kLine, 0.2) < 1e-6);
    CHECK_THROWS_AS(repulsive_removal(1.0, 1.0, 1), DomainError);
    CHECK_THROWS_AS(repulsive_removal(-1.0, 0.5, 1), DomainError);
  }

  TEST_CASE("rotating frame") {
    const double b = 1.0;
    const Mat m = *make_uniform_magnetic(2, b).uniform;
    const auto r = rotating_frame(m);
    SUBCASE("quarter turn") {
      const auto u = bump_2d(pi / (2 * b));
      const auto phi = apply(r, u);
      const auto want = sample(kPlane, [](const Point& x) {
        const double y0 = -x[1], y1 = x[0];
        return std::exp(-(y0 - 1) * (y0 - 1) - 0.5 * y1 * y1) * std::exp(I * 0.3 * y1);
      });
      CHECK(max_abs_difference(phi, want) < 1e-10);
    }
    SUBCASE("zero generator") {
      const auto id = rotating_frame(Mat::Zero(2, 2));
      CHECK(max_abs_difference(apply(id, bump_2d(0.8)), bump_2d(0.8)) < 1e-14);
    }
    SUBCASE("drift is divergence free") {
      for (double t : {0.1, 0.9, 2.5}) {
        const double h = 1e-3;
        const Mat rd = (r.frame(t + h).rotation - r.frame(t - h).rotation) / (2 * h);
        CHECK(std::abs((r.frame(t).rotation.transpose() * rd).trace()) < 1e-12);
      }
    }
    SUBCASE("weighted norms are preserved") {
      const auto u = bump_2d(0.7);
      const auto phi = apply(r, u);
      const double a = weighted_norm(u, 8.0, 1e-13).value;
      const double c = weighted_norm(phi, 8.0, 1e-13).value;
      CHECK(std::isfinite(a));
      CHECK(c == doctest::Approx(a).epsilon(1e-10));
    }
    SUBCASE("maps the magnetic equation to the oscillator") {
      const auto eq = uniform_magnetic_equation(2, b, 0.5);
      const auto neq = r.rewrite(eq);
      CHECK(neq.magnetic.is_zero());
      CHECK(neq.electric.q(0.2) == doctest::Approx(b * b / 4));
      // non-radial oscillator standing wave pulled back into the magnetic frame
      const ComplexField phi = [b](const Point& x, double t) {
        return std::exp(I * (b * 3.0) * t) * qho_value(2, b, x[0]) * qho_value(0, b, x[1]);
      };
      const auto back = inverse(r);
      const GridSpec g{2, 16.0, 256};
      CHECK(residual(pulled(back, phi), eq, g, 0.3) < 1e-6);
      CHECK(residual(phi, neq, g, 0.3) < 1e-6);
      CHECK_THROWS_AS(r.rewrite(uniform_magnetic_equation(2, 0.5, 0.5)), DomainError);
    }
    Mat bad(2, 2);
    bad << 0, 1, 1, 0;
    CHECK_THROWS_AS(rotating_frame(bad), DomainError);
  }

  TEST_CASE("chains and descriptions") {
    const Mat m = *make_uniform_magnetic(2, 1.0).uniform;
    TransformChain c{{phase_removal([](double t) { return std::cos(t); }, 2), rotating_frame(m)}};
    const auto u = bump_2d(0.6);
    CHECK(max_abs_difference(apply(inverse(c), apply(c, u)), u) < 1e-10);
    const auto d = harmonic_removal(1.0, 0.5, 1).describe();
    CHECK(d["name"] == "harmonic_removal");
    CHECK(d["params"]["omega"] == 1.0);
    CHECK(c.describe().size() >= 1);
  }
}
