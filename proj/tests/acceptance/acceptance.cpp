#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussdecay/closedform.hpp"
#include "gaussdecay/decay.hpp"
#include "gaussdecay/engine.hpp"
#include "gaussdecay/fields.hpp"
#include "gaussdecay/specfun.hpp"
#include "gaussdecay/transforms.hpp"

using namespace gd;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

double rel(const WaveField& a, const WaveField& b) { return distance(a, b) / b.norm(); }

WaveField normalized(WaveField u) {
  u.values /= u.norm();
  return u;
}

Outcome closed_form_1d() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  CounterexampleParams p;
  p.omega = 1.0;
  p.n = 1;
  p.k = 1.0;
  p.branch = Branch::plus;
  const auto v = arbitrate_reading(p, GridSpec{1, 20.0, 1024}, linspace(-0.45, 0.45, 20));
  const double secs = seconds_since(t0);
  for (const auto& [r, res] : v.residuals) o.note(fmt("reading %-20s max residual %.3e", to_string(r).c_str(), res));
  o.check(v.selected_residual < 1e-6,
          fmt("selected reading %s residual %.3e < 1e-6", to_string(v.selected).c_str(), v.selected_residual));
  o.check(secs < 10.0, fmt("runtime %.2f s < 10 s", secs));
  return o;
}

Outcome closed_form_magnetic() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  CounterexampleParams p;
  p.omega = 1.0;
  p.n = 2;
  p.k = 5.0;
  p.branch = Branch::minus;
  const GridSpec g{2, 12.0, 256};
  const auto times = linspace(-0.45, 0.45, 10);
  const auto v = arbitrate_reading(p, g, times, true);
  const double secs = seconds_since(t0);
  for (const auto& [r, res] : v.residuals) o.note(fmt("reading %-20s max residual %.3e", to_string(r).c_str(), res));
  o.check(v.selected_residual < 1e-6, fmt("branch minus, selected reading %s residual %.3e < 1e-6",
                                          to_string(v.selected).c_str(), v.selected_residual));
  o.check(secs < 120.0, fmt("runtime %.2f s < 120 s", secs));
  p.branch = Branch::plus;
  p.reading = v.selected;
  const auto eq = counterexample_magnetic_equation(p);
  double worst = 0.0;
  for (double t : times) {
    worst = std::max(worst, residual([&](const Point& x, double tt) { return counterexample_u(x, tt, p); }, eq, g, t));
  }
  o.note(fmt("branch plus on the same grid: max residual %.3e (diagnostic)", worst));
  return o;
}

Outcome spectra() {
  Outcome o;
  const GridSpec g1{1, 20.0, 1024};
  for (double w : {1.0, 2.0}) {
    const auto eq = harmonic_equation(1, w, 0.5);
    double worst = 0.0;
    for (int m = 0; m <= 10; ++m) {
      const auto s = qho_eigenfunction(m, w, g1);
      worst = std::max(worst, eigen_residual(s.field, eq, s.entry.energy));
    }
    o.check(worst < 1e-8, fmt("1D omega=%g, m=0..10: max |H psi - omega(m+1/2) psi| %.3e < 1e-8", w, worst));
  }
  const GridSpec g2{2, 16.0, 256};
  const auto eq = uniform_magnetic_equation(2, 1.0, 0.5);
  double worst_nominal = 0.0;
  double worst_true = 0.0;
  for (int m : {0, 1}) {
    for (int l = -2; l <= 2; ++l) {
      const auto s = landau_eigenfunction(m, l, 1.0, g2);
      worst_nominal = std::max(worst_nominal, eigen_residual(s.field, eq, s.entry.nominal_level));
      worst_true = std::max(worst_true, eigen_residual(s.field, eq, s.entry.energy));
    }
  }
  o.check(worst_nominal < 1e-8,
          fmt("2D b=1, (m,l) in {0,1}x{-2..2}: max residual against F_k=|b|(k+1/2) %.3e < 1e-8", worst_nominal));
  o.note(fmt("same states against 2|b|(k+1/2): max residual %.3e (diagnostic)", worst_true));
  return o;
}

Outcome decay_condition() {
  Outcome o;
  const GridSpec g1{1, 20.0, 1024};
  for (double w : {1.0, 2.0}) {
    for (int m : {0, 3, 7}) {
      const auto psi = qho_eigenfunction(m, w, g1).field;
      const auto above = weighted_norm(psi, 4.0 / w * 1.1);
      const auto below = weighted_norm(psi, 4.0 / w * 0.9);
      o.check(!above.divergent && below.divergent,
              fmt("omega=%g m=%d: alpha^2=1.1*4/omega %s (%.4g), alpha^2=0.9*4/omega %s", w, m,
                  above.divergent ? "divergent" : "finite", above.grid_value,
                  below.divergent ? "divergent" : "finite"));
    }
  }
  return o;
}

Outcome endpoint_rates() {
  Outcome o;
  const GridSpec g1{1, 20.0, 1024};
  for (double w : {0.5, 1.0, pi / 2}) {
    CounterexampleParams p;
    p.omega = w;
    p.n = 1;
    p.k = 1.0;
    const double expect = endpoint_rate(w);
    for (double t : {-0.5, 0.5}) {
      const auto u = sample(g1, [&](const Point& x) { return counterexample_u(x, t, p); }, t);
      const auto rep = fit_rate(u);
      const double rate_err = std::abs(rep.rate - expect) / expect;
      const double poly_err = std::abs(rep.poly_correction + 2.0 * p.k) / (2.0 * p.k);
      o.check(rate_err < 1e-2 && poly_err < 0.1,
              fmt("omega=%.4f t=%+.1f: rate %.6f vs omega/(8 sin omega)=%.6f (rel %.1e), poly %.4f vs -2k", w, t,
                  rep.rate, expect, rate_err, rep.poly_correction));
      const double at = alpha_tilde_sq(ThresholdKind::harmonic, w);
      const auto wn = weighted_norm(u, at);
      o.note(fmt("weighted norm at alpha~^2=4 sin(omega)/omega=%.5f: %s (outer slope %.3g)", at,
                 wn.divergent ? "divergent" : "finite", wn.outer_slope));
    }
  }
  return o;
}

WaveField test_field_1d() {
  return sample(GridSpec{1, 20.0, 1024},
                [](const Point& x) { return std::exp(-(x[0] - 1) * (x[0] - 1)) * std::exp(I * 0.5 * x[0]); });
}

WaveField test_field_2d() {
  return sample(GridSpec{2, 12.0, 256}, [](const Point& x) {
    return std::exp(-(x[0] - 1) * (x[0] - 1) - 0.5 * x[1] * x[1]) * std::exp(I * 0.3 * x[1]);
  });
}

VectorFn sine_drive() {
  return [](double t) {
    Point e(2);
    e << std::sin(t), 0.0;
    return e;
  };
}

Outcome round_trips() {
  Outcome o;
  auto run = [&](const char* name, const TransformRecord& r, WaveField u, double t) {
    u.time = t;
    const auto back = apply(inverse(r), apply(r, u));
    const double err = max_abs_difference(back, u);
    o.check(err < 1e-9, fmt("%s at t=%g: max |inverse(apply(u)) - u| %.3e < 1e-9", name, t, err));
  };
  run("harmonic_removal omega=1 T=0.5", harmonic_removal(1.0, 0.5, 1), test_field_1d(), 0.4);
  run("repulsive_removal nu=0.5 T=0.5", repulsive_removal(0.5, 0.5, 1), test_field_1d(), 0.4);
  run("electric_removal E=(sin t,0)", electric_removal(sine_drive(), 1.0, 2), test_field_2d(), 0.6);
  const auto m = *make_uniform_magnetic(2, 1.0).uniform;
  run("rotating_frame b=1", rotating_frame(m), test_field_2d(), 0.4);
  run("rotating_frame b=1", rotating_frame(m), test_field_2d(), 2.0);
  return o;
}

double square(const TransformRecord& r, const EquationSpec& eq, const WaveField& data, double T, double dt) {
  const auto a = apply(r, propagate(data, eq, T, dt));
  const auto phi0 = apply(r, data);
  const auto b = propagate(phi0, r.rewrite(eq), a.time, dt);
  return rel(a, b);
}

Outcome commuting_squares() {
  Outcome o;
  const auto bump = [](const Point& x) { return 0.5 * std::exp(-x.squaredNorm()); };
  {
    auto eq = harmonic_equation(1, 1.0, 0.5);
    eq.electric.v1 = bump;
    const double e = square(harmonic_removal(1.0, 0.5, 1), eq, test_field_1d(), 0.5, 5e-4);
    o.check(e < 1e-5, fmt("harmonic omega=1 T=0.5, V=0.5 exp(-x^2): L2 rel %.3e < 1e-5", e));
  }
  {
    auto eq = repulsive_equation(1, 0.5, 0.5);
    eq.electric.v1 = bump;
    const double e = square(repulsive_removal(0.5, 0.5, 1), eq, test_field_1d(), 0.5, 5e-4);
    o.check(e < 1e-5, fmt("repulsive nu=0.5 T=0.5, V=0.5 exp(-x^2): L2 rel %.3e < 1e-5", e));
  }
  {
    const double T = 0.5;
    const auto eq = electric_equation(2, sine_drive(), T);
    const double e = square(electric_removal(sine_drive(), T, 2), eq, test_field_2d(), T, 2e-3);
    o.check(e < 1e-5, fmt("electric E=(sin t,0) T=0.5, n=2: L2 rel %.3e < 1e-5", e));
  }
  {
    const auto eq = uniform_magnetic_equation(2, 1.0, 0.5);
    const double e = square(rotating_frame(*eq.magnetic.uniform), eq, test_field_2d(), 0.5, 1e-3);
    o.check(e < 1e-5, fmt("magnetic b=1 T=0.5, n=2: L2 rel %.3e < 1e-5", e));
  }
  return o;
}

Outcome norm_identities() {
  Outcome o;
  const GridSpec g1{1, 20.0, 1024};
  const double al2 = 8.0;
  const double floor = 1e-13;
  {
    const double w = 1.0;
    const double T = 0.5;
    const GaussianSolution gs{1, cplx(1.0, 0.0), GaussianSolution::Kind::harmonic, w};
    const auto uT = gs.sample(g1, T);
    const auto phi = apply(harmonic_removal(w, T, 1), uT);
    const double c2 = std::cos(w * T) * std::cos(w * T);
    const auto lhs = weighted_norm(uT, al2, floor);
    const auto rhs = weighted_norm(phi, al2 / c2, floor);
    const double e = std::abs(lhs.value - rhs.value) / lhs.value;
    o.check(std::isfinite(lhs.value) && e < 1e-8,
            fmt("harmonic omega=1 T=0.5 alpha^2=8: %.15f vs %.15f (phi at t=%.6f), rel %.2e < 1e-8", lhs.value,
                rhs.value, phi.time, e));
  }
  {
    const double nu = 0.5;
    const double T = 0.5;
    const GaussianSolution gs{1, cplx(1.0, 0.0), GaussianSolution::Kind::repulsive, nu};
    const auto uT = gs.sample(g1, T);
    const auto phi = apply(repulsive_removal(nu, T, 1), uT);
    const double c2 = std::cosh(nu * T) * std::cosh(nu * T);
    const auto lhs = weighted_norm(uT, al2, floor);
    const auto rhs = weighted_norm(phi, al2 / c2, floor);
    const double e = std::abs(lhs.value - rhs.value) / lhs.value;
    o.check(std::isfinite(lhs.value) && e < 1e-8,
            fmt("repulsive nu=0.5 T=0.5 alpha^2=8: %.15f vs %.15f (phi at t=%.6f), rel %.2e < 1e-8", lhs.value,
                rhs.value, phi.time, e));
  }
  return o;
}

Outcome gauge() {
  Outcome o;
  const auto transverse = [](const Point& x) {
    Point v(2);
    const double g = 1.0 / (1.0 + x.squaredNorm());
    v << -x[1] * g, x[0] * g;
    return v;
  };
  MagneticPotential a(2);
  a.a = from_xt<Point>([transverse](const Point& x, double) {
    const double e = std::exp(-x.squaredNorm());
    Point grad(2);
    grad << -2.0 * x[0] * e, -2.0 * x[1] * e;
    return Point(transverse(x) + grad);
  });
  const GridSpec g{2, 4.0, 32};
  const auto res = cronstrom_gauge(a, g);
  double recover = 0.0;
  double identity = 0.0;
  for_each_point(g, [&](Eigen::Index, const Point& x) {
    recover = std::max(recover, (res.a_tilde(x) - transverse(x)).norm());
    const Mat j = fd_jacobian(res.a_tilde, x);
    identity = std::max(identity, (Point(j * x) - (res.psi(x) - res.a_tilde(x))).norm());
  });
  o.check(res.max_transversality < 1e-9, fmt("max |x . A~| %.3e < 1e-9", res.max_transversality));
  o.check(recover < 1e-6, fmt("max |A~ - transverse part| %.3e < 1e-6", recover));
  o.check(identity < 1e-6, fmt("max |(x . grad) A~ - (Psi - A~)| %.3e < 1e-6", identity));
  return o;
}

Outcome hardy() {
  Outcome o;
  const GridSpec g1{1, 20.0, 1024};
  FitOptions fo;
  fo.fixed_poly = 0.0;
  fo.relative_floor = 1e-4;
  fo.start_fraction = 1.0;
  for (double T : {0.25, 0.5, 1.0}) {
    const double beta_sq = 4.0 * T;
    const cplx a0(1.0 / beta_sq, -1.0 / (4.0 * T));
    const auto u0 = sample(g1, [&](const Point& x) { return std::exp(-a0 * x.squaredNorm()); });
    const auto uT = free_propagate(u0, T);
    const auto r0 = fit_rate(u0, fo);
    const auto rT = fit_rate(uT, fo);
    const double b2 = 1.0 / r0.rate;
    const double a2 = 1.0 / rT.rate;
    const double ratio = std::sqrt(a2 * b2) / (4.0 * T);
    const auto v = classify(a2, b2, ThresholdKindT::free_4T, ThresholdParams{T});
    o.check(ratio >= 1.0 - kAtThresholdTolerance && ratio <= 1.001 &&
                v.classification != Classification::below_threshold,
            fmt("T=%g: alpha*beta/4T - 1 = %.2e, classified %s", T, ratio - 1.0, to_string(v.classification).c_str()));
  }
  for (double T : {0.25, 0.5, 1.0}) {
    const double eps = 1e-7;
    const double h = threshold(ThresholdKindT::harmonic_4sin, ThresholdParams{T, eps, 0.0, 0.0});
    const double r = threshold(ThresholdKindT::repulsive_4sinh, ThresholdParams{T, 0.0, eps, 0.0});
    const double e = std::max(std::abs(h - 4 * T), std::abs(r - 4 * T));
    o.check(e < 1e-10, fmt("T=%g: 4sin/4sinh thresholds at omega=nu=1e-7 within %.2e of 4T", T, e));
  }
  return o;
}

Outcome oracles() {
  Outcome o;
  {
    const GridSpec g{1, 20.0, 1024};
    const auto data = normalized(sample(g, [](const Point& x) {
      return std::exp(-(x[0] - 1) * (x[0] - 1) * cplx(1.0, -0.3));
    }));
    const double T = 0.3;
    const auto eq = harmonic_equation(1, 1.0, T);
    const auto exact = harmonic_oracle(data, 1.0, T);
    const double e = rel(propagate(data, eq, T, 1e-3), exact);
    o.check(e < 1e-5, fmt("harmonic omega=1 T=0.3 dt=1e-3: L2 rel %.3e < 1e-5", e));
    const double e1 = rel(propagate(data, eq, T, 0.02), exact);
    const double e2 = rel(propagate(data, eq, T, 0.01), exact);
    const double ratio = e1 / e2;
    o.check(ratio > 3.6 && ratio < 4.4,
            fmt("dt 0.02 -> 0.01: error %.3e -> %.3e, ratio %.3f in [3.6, 4.4]", e1, e2, ratio));
  }
  {
    const auto data = normalized(test_field_2d());
    const double T = 0.3;
    const auto eq = uniform_magnetic_equation(2, 1.0, T);
    const double e = rel(propagate(data, eq, T, 1e-3), magnetic_oracle(data, 1.0, T));
    o.check(e < 1e-5, fmt("magnetic b=1 T=0.3 dt=1e-3: L2 rel %.3e < 1e-5", e));
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  bool verbose = false;
  app.add_option("criteria", selected, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 11));
  app.add_flag("-v,--verbose", verbose, "Print per-check detail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "closed-form solution, n=1", closed_form_1d},
      {2, "closed-form solution, magnetic n=2", closed_form_magnetic},
      {3, "oscillator and Landau spectra", spectra},
      {4, "weighted norms of oscillator eigenfunctions", decay_condition},
      {5, "endpoint decay rate", endpoint_rates},
      {6, "transform round trips", round_trips},
      {7, "commuting squares", commuting_squares},
      {8, "weighted norm identities", norm_identities},
      {9, "transversal gauge", gauge},
      {10, "free-case sharpness", hardy},
      {11, "oracle equivalence and order", oracles},
  };
  if (selected.empty()) {
    for (const auto& c : all) selected.push_back(c.id);
  }
  bool ok = true;
  for (int id : selected) {
    const auto& c = all[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %2d %s  %s (%.1f s)\n", c.id, out.pass ? "PASS" : "FAIL", c.title, seconds_since(t0));
    if (verbose || !out.pass) {
      for (const auto& l : out.lines) std::printf("    %s\n", l.c_str());
    }
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
