#include <doctest.h>

#include <cmath>
#include <string>

#include "gaussdecay/engine.hpp"
#include "gaussdecay/specfun.hpp"

using namespace gd;

namespace {

const GridSpec kLine{1, 20.0, 1024};
const GridSpec kPlane{2, 12.0, 128};

WaveField packet_1d(double t = 0.0) {
  return sample(
      kLine, [](const Point& x) { return std::exp(-(x[0] - 1) * (x[0] - 1)) * std::exp(I * 0.5 * x[0]); }, t);
}

WaveField packet_2d(double t = 0.0) {
  return sample(
      kPlane, [](const Point& x) { return std::exp(-0.8 * (x[0] - 0.5) * (x[0] - 0.5) - 0.6 * x[1] * x[1]); }, t);
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("spectral Laplacian of a Gaussian") {
    const auto u = sample(kLine, [](const Point& x) { return cplx(std::exp(-x[0] * x[0])); });
    const auto lap = laplacian(u);
    double err = 0.0;
    for_each_point(kLine, [&](Eigen::Index i, const Point& x) {
      const double want = (4 * x[0] * x[0] - 2) * std::exp(-x[0] * x[0]);
      err = std::max(err, std::abs(lap.values[i] - want));
    });
    CHECK(err < 1e-10);
    const WaveField one(kLine, Eigen::ArrayXcd::Constant(kLine.size(), 1.0), 0.0);
    CHECK(laplacian(one).values.abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("magnetic Laplacian") {
    const auto u = packet_2d();
    const MagneticPotential none(2);
    CHECK(max_abs_difference(magnetic_laplacian(u, none), laplacian(u)) < 1e-12);

    // Delta_{A + grad chi}(e^{i chi} u) = e^{i chi} Delta_A u
    const auto a = make_uniform_magnetic(2, 1.0);
    const double c = 0.3;
    const auto shifted = MagneticPotential::from_field(2, [a, c](const Point& x, double) {
      Point g(2);
      g << c * x[1], c * x[0];
      return Point(a.total_at(0.0)(x) + g);
    });
    Eigen::ArrayXcd phase(kPlane.size());
    for_each_point(kPlane, [&](Eigen::Index i, const Point& x) { phase[i] = std::exp(I * (c * x[0] * x[1])); });
    const WaveField gu(kPlane, phase * u.values, 0.0);
    const WaveField lhs = magnetic_laplacian(gu, shifted);
    const WaveField rhs(kPlane, phase * magnetic_laplacian(u, a).values, 0.0);
    CHECK(max_abs_difference(lhs, rhs) < 1e-8);

    const auto phi = landau_eigenfunction(0, 0, 1.0, GridSpec{2, 16.0, 256});
    CHECK(eigen_residual(phi.field, uniform_magnetic_equation(2, 1.0, 0.5), 1.0) < 1e-10);
  }

  TEST_CASE("standing-wave convention") {
    const double w = 2.0;
    const auto eq = harmonic_equation(1, w, 0.5);
    const auto psi = qho_eigenfunction(0, w, kLine).field;
    const double e0 = 1.0;
    const auto out = propagate(psi, eq, 0.3, 1e-3);
    const WaveField want(kLine, std::exp(I * (e0 * 0.3)) * psi.values, 0.3);
    CHECK(max_abs_difference(out, want) < 1e-6);
    const WaveField other(kLine, std::exp(-I * (e0 * 0.3)) * psi.values, 0.3);
    CHECK(max_abs_difference(out, other) > 0.1);
    const ComplexField sw = [e0, w](const Point& x, double t) { return std::exp(I * e0 * t) * qho_value(0, w, x[0]); };
    CHECK(residual(sw, eq, kLine, 0.2) < 1e-8);
    const ComplexField bad = [e0, w](const Point& x, double t) {
      return std::exp(-I * e0 * t) * qho_value(0, w, x[0]);
    };
    CHECK(residual(bad, eq, kLine, 0.2) > 1e-2);
  }

  TEST_CASE("norm behaviour") {
    auto eq = harmonic_equation(1, 1.0, 0.5);
    const auto u = packet_1d();
    CHECK(propagate(u, eq, 0.4, 1e-3).norm() == doctest::Approx(u.norm()).epsilon(1e-10));

    const auto mag = propagate(packet_2d(), uniform_magnetic_equation(2, 1.0, 0.5), 0.3, 1e-3);
    CHECK(mag.norm() == doctest::Approx(packet_2d().norm()).epsilon(1e-10));

    // Im V < 0 feeds the norm: d/dt |u|^2 = 0.2 |u|^2
    eq.electric.v2 = from_xt<cplx>([](const Point&, double) { return cplx(0.0, -0.1); });
    double last = u.norm();
    WaveField v = u;
    for (int s = 1; s <= 4; ++s) {
      v = propagate(v, eq, 0.1 * s, 1e-3);
      CHECK(v.norm() > last);
      last = v.norm();
    }
    CHECK(last == doctest::Approx(u.norm() * std::exp(0.1 * 0.4)).epsilon(1e-10));
  }

  TEST_CASE("Gaussian solutions match oracle and propagator") {
    const GaussianSolution g{1, cplx(0.8, 0.3), GaussianSolution::Kind::harmonic, 1.0};
    const auto eq = harmonic_equation(1, 1.0, 1.0);
    const auto ex = g.sample(kLine, 0.6);
    CHECK(max_abs_difference(harmonic_oracle(g.sample(kLine, 0.0), 1.0, 0.6), ex) < 1e-10);
    CHECK(max_abs_difference(propagate(g.sample(kLine, 0.0), eq, 0.6, 1e-3), ex) < 1e-6);
    const ComplexField f = [g](const Point& x, double t) { return g.value(x, t); };
    CHECK(residual(f, eq, kLine, 0.4) < 1e-8);

    const GaussianSolution fr{2, cplx(0.5, 0.0), GaussianSolution::Kind::free, 0.0};
    CHECK(max_abs_difference(free_propagate(fr.sample(kPlane, 0.0), 0.7), fr.sample(kPlane, 0.7)) < 1e-10);

    const GaussianSolution rp{1, cplx(0.5, 0.0), GaussianSolution::Kind::repulsive, 0.8};
    const ComplexField fp = [rp](const Point& x, double t) { return rp.value(x, t); };
    CHECK(residual(fp, repulsive_equation(1, 0.8, 1.0), kLine, 0.5) < 1e-8);
  }

  TEST_CASE("oracles") {
    const auto u = packet_1d();
    CHECK(max_abs_difference(harmonic_oracle(u, 1.0, 0.0), u) < 1e-13);
    const auto psi = qho_eigenfunction(2, 1.5, kLine).field;
    const auto o = harmonic_oracle(psi, 1.5, 0.5);
    CHECK(max_abs_difference(o, WaveField(kLine, std::exp(I * (1.5 * 2.5 * 0.5)) * psi.values, 0.5)) < 1e-10);

    const GridSpec g{2, 16.0, 256};
    const auto phi = landau_eigenfunction(0, -1, 1.0, g).field;
    const auto m = magnetic_oracle(phi, 1.0, 0.4);
    CHECK(max_abs_difference(m, WaveField(g, std::exp(I * (3.0 * 0.4)) * phi.values, 0.4)) < 1e-10);

    CHECK_THROWS_AS(harmonic_oracle(u, 1.0, 1.6), DomainError);
    CHECK_THROWS_AS(magnetic_oracle(packet_2d(), 1.0, 1.6), DomainError);
  }

  TEST_CASE("factory guards") {
    try {
      harmonic_equation(1, 2.0, 1.0);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("pi/(2T)") != std::string::npos);
    }
    CHECK_THROWS_AS(repulsive_equation(1, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(uniform_magnetic_equation(3, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(free_equation(1, 0.0), DomainError);
    CHECK_THROWS_AS(propagate(packet_1d(), free_equation(2, 1.0), 0.1, 1e-3), DomainError);
  }

  TEST_CASE("step and boundary guards") {
    PropagateOptions o;
    o.magnetic_cfl = 1e-6;
    CHECK_THROWS_AS(propagate(packet_2d(), uniform_magnetic_equation(2, 1.0, 0.5), 0.1, 1e-2, o), StepError);
    CHECK_THROWS_AS(propagate(packet_1d(), free_equation(1, 1.0), 0.1, -1.0), StepError);
    const GridSpec small{1, 4.0, 64};
    const auto wide = sample(small, [](const Point& x) { return cplx(std::exp(-0.5 * x[0] * x[0])); });
    CHECK_THROWS_AS(propagate(wide, free_equation(1, 5.0), 3.0, 1e-2), GridError);
  }

  TEST_CASE("phase reading arbiter") {
    CounterexampleParams p;
    p.omega = 1.0;
    p.n = 1;
    p.k = 1.0;
    const auto v = arbitrate_reading(p, kLine, {-0.3, 0.0, 0.2});
    CHECK(v.selected == PhaseReading::quadratic_conjugate);
    CHECK(v.selected_residual < 1e-6);
    for (const auto& [r, res] : v.residuals) {
      if (r != PhaseReading::quadratic_conjugate) CHECK(res > 1e-2);
    }
  }
}
