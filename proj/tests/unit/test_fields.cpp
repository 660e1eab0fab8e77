#include <doctest.h>

#include <cmath>

#include "gaussdecay/closedform.hpp"
#include "gaussdecay/fields.hpp"

using namespace gd;

namespace {

Point pt(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

Point transverse(const Point& x) {
  const double g = 1.0 / (1.0 + x.squaredNorm());
  return pt(-x[1] * g, x[0] * g);
}

Point grad_chi(const Point& x) {
  const double e = std::exp(-x.squaredNorm());
  return pt(-2 * x[0] * e, -2 * x[1] * e);
}

const GridSpec kGaugeGrid{2, 4.0, 16};

}  // namespace

TEST_SUITE("fields") {
  TEST_CASE("uniform magnetic matrices") {
    const auto a = make_uniform_magnetic(2, 1.0);
    REQUIRE(a.uniform);
    Mat want(2, 2);
    want << 0, -1, 1, 0;
    CHECK((*a.uniform - want).norm() == 0.0);
    const Point c = a.total_at(0.0)(pt(0.4, -1.2));
    CHECK(c[0] == doctest::Approx(0.6));
    CHECK(c[1] == doctest::Approx(0.2));

    const auto a4 = make_uniform_magnetic(4, 2.0);
    const Mat m = *a4.uniform;
    CHECK((m.transpose() * m - 4.0 * Mat::Identity(4, 4)).norm() == 0.0);
    CHECK((m + m.transpose()).norm() == 0.0);

    CHECK_THROWS_AS(make_uniform_magnetic(3, 1.0), DomainError);
    CHECK_THROWS_AS(make_uniform_magnetic(2, 0.0), DomainError);
    CHECK_THROWS_AS(make_uniform_magnetic(4, 1.0, {{0, 1}, {1, 2}}), DomainError);
  }

  TEST_CASE("field of the uniform potential") {
    const auto a = make_uniform_magnetic(2, 1.5);
    const Mat b = a.field_at(0.0)(pt(0.3, 0.9));
    CHECK(b(0, 1) == doctest::Approx(1.5));
    CHECK(b(1, 0) == doctest::Approx(-1.5));
  }

  TEST_CASE("rotation planes follow M") {
    const Mat m = *make_uniform_magnetic(2, 2.0).uniform;
    const auto planes = rotation_planes(m, 0.25);
    REQUIRE(planes.size() == 1);
    CHECK(planes[0].angle == doctest::Approx(0.5));
    const Mat r = rotation_matrix(2, planes);
    CHECK((r.transpose() * r - Mat::Identity(2, 2)).norm() < 1e-15);
    Mat bad(2, 2);
    bad << 0, 1, 1, 0;
    CHECK_THROWS_AS(rotation_planes(bad, 1.0), DomainError);
  }

  TEST_CASE("finite-difference Jacobian") {
    Mat j0(2, 2);
    j0 << 1, 2, -3, 0.5;
    const Slice<Point> lin = [&](const Point& x) { return Point(j0 * x); };
    CHECK((fd_jacobian(lin, pt(0.3, -2.0)) - j0).norm() < 1e-12);
  }

  TEST_CASE("electric potential totals") {
    const auto e = ElectricPotential::quadratic_only(0.25);
    Point x(1);
    x << 2.0;
    CHECK(e.total_at(0.0, 1)(x).real() == doctest::Approx(1.0));
    ElectricPotential f;
    f.v1 = [](const Point& y) { return 0.5 * y[0]; };
    f.e_drive = [](double t) {
      Point v(1);
      v << t;
      return v;
    };
    f.phase_drive = [](double) { return 3.0; };
    CHECK(f.total_at(2.0, 1)(x).real() == doctest::Approx(1.0 + 4.0 + 3.0));
  }

  TEST_CASE("gauge of a pure gradient vanishes") {
    const auto a = MagneticPotential::from_field(2, [](const Point& x, double) { return grad_chi(x); });
    const auto g = cronstrom_gauge(a, kGaugeGrid);
    CHECK(g.a_tilde_samples.cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("symmetric gauge is already transverse") {
    const auto a = make_uniform_magnetic(2, 1.0);
    const auto g = cronstrom_gauge(a, kGaugeGrid);
    double err = 0.0;
    for_each_point(kGaugeGrid, [&](Eigen::Index, const Point& x) {
      err = std::max(err, (g.a_tilde(x) - a.total_at(0.0)(x)).norm());
    });
    CHECK(err < 1e-9);
  }

  TEST_CASE("gauge strips the gradient part") {
    const auto a =
        MagneticPotential::from_field(2, [](const Point& x, double) { return Point(transverse(x) + grad_chi(x)); });
    const auto g = cronstrom_gauge(a, kGaugeGrid);
    CHECK(g.max_transversality < 1e-9);
    double recover = 0.0, ident = 0.0, pot = 0.0, bfield = 0.0;
    const auto at = MagneticPotential::from_field(2, [&](const Point& x, double) { return g.a_tilde(x); });
    const auto ba = a.field_at(0.0);
    const auto bt = at.field_at(0.0);
    for_each_point(kGaugeGrid, [&](Eigen::Index, const Point& x) {
      recover = std::max(recover, (g.a_tilde(x) - transverse(x)).norm());
      const Mat j = fd_jacobian(g.a_tilde, x);
      ident = std::max(ident, (Point(j * x) - (g.psi(x) - g.a_tilde(x))).norm());
      // A - grad(phi) = A~
      const double h = 1e-4;
      Point grad(2);
      for (int d = 0; d < 2; ++d) {
        Point xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        grad[d] = (g.phi(xp) - g.phi(xm)) / (2 * h);
      }
      pot = std::max(pot, (a.total_at(0.0)(x) - grad - g.a_tilde(x)).norm());
      bfield = std::max(bfield, (ba(x) - bt(x)).norm());
    });
    CHECK(recover < 1e-9);
    CHECK(ident < 1e-6);
    CHECK(pot < 1e-6);
    CHECK(bfield < 1e-6);

    const auto again = cronstrom_gauge(at, kGaugeGrid, 0.0, 1e-8);
    CHECK((again.a_tilde_samples - g.a_tilde_samples).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("(HM) checks") {
    SUBCASE("zero field") {
      auto a = MagneticPotential::from_field(2, [](const Point& x, double) { return grad_chi(x); });
      a.xi = pt(1.0, 0.0);
      const auto r = validate_HM(a, kGaugeGrid);
      CHECK(r.psi_sup < 1e-9);
      CHECK(r.xi_ok);
      CHECK(r.pass);
    }
    SUBCASE("nonzero 2D field") {
      auto a = make_uniform_magnetic(2, 1.0);
      const auto r = validate_HM(a, kGaugeGrid);
      CHECK(r.note.find("cannot hold in dimensions 1, 2") != std::string::npos);
      CHECK(r.note.find("assumed, not checked") != std::string::npos);
      a.xi = pt(0.0, 1.0);
      CHECK_FALSE(validate_HM(a, kGaugeGrid).xi_ok);
    }
    SUBCASE("3D field with a null direction") {
      auto a = MagneticPotential::from_field(3, [](const Point& x, double) {
        const double f = std::exp(-(x[0] * x[0] + x[1] * x[1]));
        Point v(3);
        v << -x[1] * f, x[0] * f, 0.0;
        return v;
      });
      Point xi(3);
      xi << 0, 0, 1;
      a.xi = xi;
      const GridSpec g3{3, 3.0, 16};
      const auto r = validate_HM(a, g3);
      CHECK(r.xi_ok);
      CHECK(r.xi_residual < 1e-8);
      const auto gauge = cronstrom_gauge(a, g3);
      double along = 0.0;
      for (Eigen::Index i = 0; i < gauge.a_tilde_samples.rows(); ++i) {
        along = std::max(along, std::abs(gauge.a_tilde_samples(i, 2)));
      }
      CHECK(along < 1e-9);
    }
  }

  TEST_CASE("(HE) checks") {
    const GridSpec g{1, 10.0, 64};
    ElectricPotential bounded;
    bounded.v1 = [](const Point& x) { return std::cos(x[0]); };
    const auto r = validate_HE(bounded, 1.0, 1.0, 1.0, g);
    CHECK(r.pass);
    CHECK(r.weighted_v2_log_sup == -std::numeric_limits<double>::infinity());

    ElectricPotential linear;
    linear.v1 = [](const Point& x) { return std::abs(x[0]); };
    CHECK_FALSE(validate_HE(linear, 1.0, 1.0, 1.0, g).pass);

    CounterexampleParams p;
    ElectricPotential cv;
    cv.v2 = from_xt<cplx>([p](const Point& x, double t) { return counterexample_V(x, t, p); });
    const auto rc = validate_HE(cv, 1.0, 1.0, 0.5, g);
    CHECK_FALSE(rc.pass);
    CHECK(rc.im_v2_sup > 0.0);

    CHECK_THROWS_AS(validate_HE(bounded, 0.0, 1.0, 1.0, g), DomainError);
  }
}
