#include "scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "gaussdecay/closedform.hpp"
#include "gaussdecay/decay.hpp"
#include "gaussdecay/engine.hpp"
#include "gaussdecay/fields.hpp"
#include "gaussdecay/io.hpp"
#include "gaussdecay/specfun.hpp"
#include "gaussdecay/transforms.hpp"

namespace gd::cli {

void Report::check(bool ok, const std::string& what) {
  if (!ok) {
    pass = false;
    failures.push_back(what);
    spdlog::warn("{}: FAIL {}", name, what);
  } else {
    spdlog::debug("{}: ok {}", name, what);
  }
}

namespace {

using io::format_double;

std::string cell(double v) { return format_double(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

std::vector<double> linspace(double a, double b, int n) {
  if (n == 1) return {a};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

GridSpec grid_from(const Params& p, GridSpec fallback) {
  if (!p.has("grid")) return fallback;
  const Params g = p.sub("grid");
  GridSpec s{g.integer("n", fallback.dim), g.num("L", fallback.half_width), g.integer("N", fallback.points)};
  s.validate();
  return s;
}

CounterexampleParams counterexample_from(const Params& p, int n_default) {
  CounterexampleParams c;
  c.omega = p.num("omega", 1.0);
  c.n = p.integer("n", n_default);
  c.k = p.num("k", 1.0);
  c.branch = parse_branch(p.str("branch", "plus"));
  c.reading = parse_reading(p.str("reading", to_string(PhaseReading::quadratic_conjugate)));
  return c;
}

VectorFn drive_from(const Params& p, int n) {
  const std::vector<double> amp = p.nums("E");
  if (static_cast<int>(amp.size()) != n) {
    throw ConfigError(p.where() + ".E needs " + std::to_string(n) + " components");
  }
  const std::string profile = p.str("profile", "constant");
  Point e(n);
  for (int i = 0; i < n; ++i) e[i] = amp[i];
  if (profile == "constant") return [e](double) { return e; };
  if (profile == "sin") return [e](double t) { return Point(std::sin(t) * e); };
  if (profile == "cos") return [e](double t) { return Point(std::cos(t) * e); };
  throw ConfigError(p.where() + ".profile '" + profile + "' is unknown (constant, sin, cos)");
}

struct Equation {
  EquationSpec spec;
  std::string name;
  double parameter = 0.0;
};

Equation equation_from(const Params& p, int n) {
  Equation e;
  e.name = p.str("name");
  if (e.name == "counterexample" || e.name == "counterexample_magnetic") {
    const auto c = counterexample_from(p, n);
    e.parameter = c.omega;
    e.spec = e.name == "counterexample" ? counterexample_equation(c) : counterexample_magnetic_equation(c);
    return e;
  }
  const double T = p.num("T", 1.0);
  if (e.name == "free") {
    e.spec = free_equation(n, T);
  } else if (e.name == "harmonic") {
    e.parameter = p.num("omega");
    e.spec = harmonic_equation(n, e.parameter, T);
  } else if (e.name == "repulsive") {
    e.parameter = p.num("nu");
    e.spec = repulsive_equation(n, e.parameter, T);
  } else if (e.name == "uniform_magnetic") {
    e.parameter = p.num("b");
    e.spec = uniform_magnetic_equation(n, e.parameter, T);
  } else if (e.name == "electric") {
    e.spec = electric_equation(n, drive_from(p, n), T);
  } else {
    throw ConfigError(p.where() + ".name '" + e.name +
                      "' is unknown (free, harmonic, repulsive, uniform_magnetic, electric, counterexample, "
                      "counterexample_magnetic)");
  }
  return e;
}

WaveField data_from(const Params& p, const GridSpec& g) {
  const std::string name = p.str("name");
  const double t = p.num("time", 0.0);
  if (name == "file") {
    WaveField u = io::read_snapshot(p.str("path"));
    if (p.has("time")) u.time = t;
    return u;
  }
  WaveField u;
  if (name == "gaussian") {
    const double beta2 = p.num("beta2");
    if (!(beta2 > 0.0)) throw ConfigError(p.where() + ".beta2 must be positive");
    const cplx a(1.0 / beta2, p.num("chirp", 0.0));
    const std::vector<double> c = p.nums("center", std::vector<double>(g.dim, 0.0));
    if (static_cast<int>(c.size()) != g.dim) throw ConfigError(p.where() + ".center has the wrong dimension");
    Point x0(g.dim);
    for (int i = 0; i < g.dim; ++i) x0[i] = c[i];
    u = sample(g, [&](const Point& x) { return std::exp(-a * (x - x0).squaredNorm()); }, t);
  } else if (name == "oscillator") {
    if (g.dim != 1) throw ConfigError(p.where() + ": oscillator data need a 1D grid");
    u = qho_eigenfunction(p.integer("m"), p.num("omega"), g).field;
    u.time = t;
  } else if (name == "landau") {
    if (g.dim != 2) throw ConfigError(p.where() + ": Landau data need a 2D grid");
    u = landau_eigenfunction(p.integer("m"), p.integer("l"), p.num("b"), g).field;
    u.time = t;
  } else if (name == "closed_form") {
    const auto c = counterexample_from(p, g.dim);
    if (c.n != g.dim) throw ConfigError(p.where() + ".n does not match the grid");
    c.validate();
    u = sample(g, [&](const Point& x) { return counterexample_u(x, t, c); }, t);
  } else {
    throw ConfigError(p.where() + ".name '" + name + "' is unknown (gaussian, oscillator, landau, closed_form, file)");
  }
  if (p.flag("normalize", false)) u.values /= u.norm();
  return u;
}

TransformRecord transform_from(const Params& p, int n) {
  const std::string name = p.str("name");
  TransformRecord r;
  if (name == "harmonic_removal") {
    r = harmonic_removal(p.num("omega"), p.num("T"), n);
  } else if (name == "repulsive_removal") {
    r = repulsive_removal(p.num("nu"), p.num("T"), n);
  } else if (name == "electric_removal") {
    r = electric_removal(drive_from(p, n), p.num("T"), n);
  } else if (name == "rotating_frame") {
    r = rotating_frame(*make_uniform_magnetic(n, p.num("b")).uniform);
  } else if (name == "phase_removal") {
    const double k = p.num("k");
    r = phase_removal([k](double) { return k; }, n);
  } else {
    throw ConfigError(p.where() + ".name '" + name +
                      "' is unknown (harmonic_removal, repulsive_removal, electric_removal, rotating_frame, "
                      "phase_removal)");
  }
  return p.flag("inverse", false) ? inverse(r) : r;
}

struct Field {
  MagneticPotential potential;
  std::string name;
  Slice<Point> transverse;  // known transverse part, when there is one
};

Field magnetic_from(const Params& p, int n) {
  Field f;
  f.name = p.str("name");
  auto grad_chi = [](const Point& x) { return Point(-2.0 * std::exp(-x.squaredNorm()) * x); };
  if (f.name == "uniform") {
    f.potential = make_uniform_magnetic(n, p.num("b"));
    const auto total = f.potential.total_at(0.0);
    f.transverse = total;
  } else if (f.name == "pure_gradient") {
    f.potential = MagneticPotential::from_field(n, [grad_chi](const Point& x, double) { return grad_chi(x); });
    f.transverse = [n](const Point&) { return Point(Point::Zero(n)); };
  } else if (f.name == "transverse_plus_gradient") {
    if (n != 2) throw ConfigError(p.where() + ": transverse_plus_gradient is defined on a 2D grid");
    auto tr = [](const Point& x) {
      const double g = 1.0 / (1.0 + x.squaredNorm());
      Point v(2);
      v << -x[1] * g, x[0] * g;
      return v;
    };
    f.potential = MagneticPotential::from_field(
        2, [tr, grad_chi](const Point& x, double) { return Point(tr(x) + grad_chi(x)); });
    f.transverse = tr;
  } else {
    throw ConfigError(p.where() + ".name '" + f.name + "' is unknown (uniform, pure_gradient, transverse_plus_gradient)");
  }
  return f;
}

ThresholdKindT threshold_kind_from(const std::string& s) {
  static const std::map<std::string, ThresholdKindT> shorthand = {{"free", ThresholdKindT::free_4T},
                                                                  {"harmonic", ThresholdKindT::harmonic_4sin},
                                                                  {"repulsive", ThresholdKindT::repulsive_4sinh},
                                                                  {"magnetic", ThresholdKindT::magnetic_4sin}};
  const auto it = shorthand.find(s);
  return it != shorthand.end() ? it->second : parse_threshold_kind(s);
}

FitOptions fit_options_from(const Params& p) {
  FitOptions o;
  o.r_min = p.num("r_min", o.r_min);
  o.r_max = p.num("r_max", o.r_max);
  o.relative_floor = p.num("relative_floor", o.relative_floor);
  o.start_fraction = p.num("start_fraction", o.start_fraction);
  o.residual_threshold = p.num("residual_threshold", o.residual_threshold);
  if (const auto f = p.maybe_num("fixed_poly")) o.fixed_poly = *f;
  return o;
}

nlohmann::json to_json(const EndpointRateFit& f) {
  return {{"rate", f.rate}, {"poly", f.poly}, {"residual", f.residual}, {"fit_window", {f.r_min, f.r_max}}};
}

// ---------------------------------------------------------------------------

Job verify_closed_form(const Params& p, const std::string& name) {
  const bool magnetic = p.flag("magnetic", false);
  auto c = counterexample_from(p, magnetic ? 2 : 1);
  magnetic ? c.validate_magnetic() : c.validate();
  const GridSpec g = grid_from(p, magnetic ? GridSpec{2, 12.0, 256} : GridSpec{1, 20.0, 1024});
  if (g.dim != c.n) throw ConfigError(name + ": grid dimension does not match n");
  const int count = p.integer("times", magnetic ? 10 : 20);
  const double t_max = p.num("t_max", 0.45);
  if (count < 1 || !(t_max > 0.0 && t_max < 0.5)) throw ConfigError(name + ": need times >= 1 and 0 < t_max < 1/2");
  const double tol = p.num("tolerance", 1e-6);
  const bool endpoints = p.flag("endpoint_rates", !magnetic);
  if (endpoints && magnetic) throw ConfigError(name + ": endpoint_rates is only available for the n=1 problem");

  return [=] {
    Report r;
    r.name = name;
    r.header = {"probe", "t", "value", "reference", "pass"};
    const auto v = arbitrate_reading(c, g, linspace(-t_max, t_max, count), magnetic);
    for (const auto& [reading, res] : v.residuals) {
      const bool sel = reading == v.selected;
      r.rows.push_back({"residual_" + to_string(reading), "sampled", cell(res), cell(tol), sel ? cell(res < tol) : "n/a"});
      r.summary["residuals"][to_string(reading)] = res;
    }
    r.summary["selected_reading"] = to_string(v.selected);
    r.summary["selected_residual"] = v.selected_residual;
    spdlog::info("{}: reading {} residual {:.3e}", name, to_string(v.selected), v.selected_residual);
    r.check(v.selected_residual < tol, "closed-form residual below tolerance");

    if (endpoints) {
      CounterexampleParams s = c;
      s.reading = v.selected;
      const double want = endpoint_rate(c.omega);
      for (double t : {0.5, -0.5}) {
        const auto f = measured_endpoint_rate(s, t);
        const bool rate_ok = std::abs(f.rate - want) < 1e-2 * want;
        const bool poly_ok = std::abs(f.poly + 2 * c.k) < 0.1 * 2 * c.k;
        r.rows.push_back({"endpoint_rate", cell(t), cell(f.rate), cell(want), cell(rate_ok)});
        r.rows.push_back({"endpoint_poly", cell(t), cell(f.poly), cell(-2 * c.k), cell(poly_ok)});
        r.summary["endpoint"][t > 0 ? "plus" : "minus"] = to_json(f);
        r.check(rate_ok, "endpoint rate within 1% at t=" + cell(t));
        r.check(poly_ok, "endpoint power within 10% at t=" + cell(t));
      }
      const double a2 = alpha_tilde_sq(ThresholdKind::harmonic, c.omega);
      const auto u = sample(g, [&](const Point& x) { return counterexample_u(x, 0.5, s); }, 0.5);
      const auto w = weighted_norm(u, a2);
      r.rows.push_back({"weighted_norm_alpha_tilde", "0.5", cell(w.divergent ? INFINITY : w.value), cell(a2), "n/a"});
      r.summary["alpha_tilde_sq"] = a2;
      r.summary["weighted_norm_at_alpha_tilde"] = io::to_json(w);
    }
    return r;
  };
}

Job simulate(const Params& p, const std::string& name) {
  const GridSpec g = grid_from(p, GridSpec{1, 20.0, 1024});
  const Equation eq = equation_from(p.sub("equation"), g.dim);
  const WaveField data = data_from(p.sub("data"), g);
  if (data.grid.dim != g.dim || data.grid.points != g.points || data.grid.half_width != g.half_width) {
    throw ConfigError(name + ": data grid does not match the scenario grid");
  }
  std::vector<double> times = p.nums("times");
  std::sort(times.begin(), times.end());
  for (double t : times) {
    if (t < data.time || t > eq.spec.t1 + 1e-12) {
      throw ConfigError(name + ": probe time " + cell(t) + " lies outside [" + cell(data.time) + ", " +
                        cell(eq.spec.t1) + "]");
    }
  }
  const double dt = p.num("dt", 1e-3);
  if (!(dt > 0.0)) throw ConfigError(name + ".dt must be positive");
  std::string oracle = p.str("oracle", "auto");
  if (oracle == "auto") {
    oracle = eq.name == "harmonic" ? "harmonic" : eq.name == "uniform_magnetic" ? "magnetic" : eq.name == "free" ? "free" : "none";
  }
  if (oracle != "none" && oracle != eq.name && !(oracle == "magnetic" && eq.name == "uniform_magnetic")) {
    throw ConfigError(name + ".oracle '" + oracle + "' does not fit equation '" + eq.name + "'");
  }
  if (oracle != "none" && data.time != 0.0) throw ConfigError(name + ": oracles need data at t = 0");
  const double tol = p.num("tolerance", 1e-5);
  const bool snapshots = p.flag("snapshot", false);
  const bool fit = p.flag("fit", true);
  FitOptions fo = fit_options_from(p);
  if (!p.has("relative_floor")) fo.relative_floor = 1e-10;

  return [=] {
    Report r;
    r.name = name;
    r.header = {"t", "norm", "rate", "poly_correction", "fit_trusted", "oracle_rel_error"};
    WaveField u = data;
    int index = 0;
    for (double t : times) {
      u = propagate(u, eq.spec, t, dt);
      std::vector<std::string> row = {cell(t), cell(u.norm())};
      if (fit) {
        const auto f = fit_rate(u, fo);
        row.insert(row.end(), {cell(f.rate), cell(f.poly_correction), cell(f.trusted)});
      } else {
        row.insert(row.end(), {"", "", ""});
      }
      if (oracle != "none") {
        WaveField exact;
        if (oracle == "harmonic") exact = harmonic_oracle(data, eq.parameter, t);
        if (oracle == "magnetic") exact = magnetic_oracle(data, eq.parameter, t);
        if (oracle == "free") exact = free_propagate(data, t);
        const double err = distance(u, exact) / exact.norm();
        row.push_back(cell(err));
        r.check(err < tol, "oracle agreement at t=" + cell(t));
      } else {
        row.push_back("");
      }
      r.check(u.all_finite(), "finite field at t=" + cell(t));
      r.rows.push_back(row);
      if (snapshots) r.snapshots.emplace_back("t" + std::to_string(index), u);
      ++index;
    }
    r.summary["equation"] = eq.name;
    r.summary["oracle"] = oracle;
    r.summary["final_norm"] = u.norm();
    spdlog::info("{}: propagated to t={} with dt={}", name, u.time, dt);
    return r;
  };
}

Job transform(const Params& p, const std::string& name) {
  const GridSpec g = grid_from(p, GridSpec{1, 20.0, 1024});
  WaveField data;
  if (p.has("input")) {
    data = io::read_snapshot(p.str("input"));
    if (const auto t = p.maybe_num("time")) data.time = *t;
  } else {
    data = data_from(p.sub("data"), g);
  }
  TransformChain chain;
  for (const auto& s : p.list("chain")) chain.records.push_back(transform_from(s, data.grid.dim));
  if (chain.records.empty()) throw ConfigError(name + ".chain is empty");
  const bool round_trip = p.flag("round_trip", true);
  const double tol = p.num("tolerance", 1e-9);
  const bool snapshot = p.flag("snapshot", true);

  return [=] {
    Report r;
    r.name = name;
    r.header = {"step", "transform", "time_in", "time_out", "norm_in", "norm_out"};
    WaveField u = data;
    for (std::size_t i = 0; i < chain.records.size(); ++i) {
      const WaveField v = apply(chain.records[i], u);
      r.rows.push_back({std::to_string(i), chain.records[i].name, cell(u.time), cell(v.time), cell(u.norm()),
                        cell(v.norm())});
      u = v;
    }
    r.summary["chain"] = chain.describe();
    if (round_trip) {
      const WaveField back = apply(inverse(chain), u);
      const double err = max_abs_difference(back, data);
      r.summary["round_trip_max_error"] = err;
      r.check(err < tol, "round trip within " + cell(tol));
    }
    if (snapshot) r.snapshots.emplace_back("result", u);
    return r;
  };
}

Job gauge(const Params& p, const std::string& name) {
  const GridSpec g = grid_from(p, GridSpec{2, 4.0, 32});
  const Field f = magnetic_from(p.sub("field"), g.dim);
  const double t = p.num("t", 0.0);
  const double tol = p.num("tolerance", 1e-9);

  return [=] {
    Report r;
    r.name = name;
    r.header = {"field", "max_abs_a_tilde", "max_transversality", "max_recovery_error", "hm_pass"};
    const auto res = cronstrom_gauge(f.potential, g, t);
    const double amax = res.a_tilde_samples.size() ? res.a_tilde_samples.cwiseAbs().maxCoeff() : 0.0;
    double recover = 0.0;
    for_each_point(g, [&](Eigen::Index, const Point& x) {
      recover = std::max(recover, (res.a_tilde(x) - f.transverse(x)).norm());
    });
    const auto hm = validate_HM(f.potential, g, t);
    r.rows.push_back({f.name, cell(amax), cell(res.max_transversality), cell(recover), cell(hm.pass)});
    r.summary["max_abs_a_tilde"] = amax;
    r.summary["max_transversality"] = res.max_transversality;
    r.summary["max_recovery_error"] = recover;
    r.summary["hm_note"] = hm.note;
    r.check(res.max_transversality < tol, "x . A~ vanishes");
    r.check(recover < 1e-6, "A~ equals the transverse part");
    if (f.name == "pure_gradient") spdlog::info("{}: pure gradient reduces to max|A~| = {:.3e}", name, amax);
    return r;
  };
}

Job eigen(const Params& p, const std::string& name) {
  const std::string family = p.str("family", "oscillator");
  const int max_m = p.integer("max_m", 10);
  const double tol = p.num("tolerance", 1e-8);
  if (max_m < 0) throw ConfigError(name + ".max_m must be >= 0");
  if (family == "oscillator") {
    const double w = p.num("omega", 1.0);
    oscillator_entry(0, w);
    const GridSpec g = grid_from(p, GridSpec{1, 20.0, 1024});
    if (g.dim != 1) throw ConfigError(name + ": the oscillator table uses a 1D grid");
    const auto eq = harmonic_equation(1, w, 1.0 / w);
    return [=] {
      Report r;
      r.name = name;
      r.header = {"m", "energy", "eigen_residual"};
      for (int m = 0; m <= max_m; ++m) {
        const auto s = qho_eigenfunction(m, w, g);
        const double res = eigen_residual(s.field, eq, s.entry.energy);
        r.rows.push_back({std::to_string(m), cell(s.entry.energy), cell(res)});
        r.check(res < tol, "eigen-residual of m=" + std::to_string(m));
      }
      return r;
    };
  }
  if (family == "landau") {
    const double b = p.num("b", 1.0);
    const int max_l = p.integer("max_l", 2);
    landau_entry(0, 0, b);
    const GridSpec g = grid_from(p, GridSpec{2, 16.0, 256});
    if (g.dim != 2) throw ConfigError(name + ": the Landau table uses a 2D grid");
    const auto eq = uniform_magnetic_equation(2, std::abs(b), 1.0 / std::abs(b));
    return [=] {
      Report r;
      r.name = name;
      r.header = {"m", "l", "level", "energy", "nominal_energy", "eigen_residual", "nominal_residual"};
      for (int m = 0; m <= max_m; ++m) {
        for (int l = -max_l; l <= max_l; ++l) {
          const auto s = landau_eigenfunction(m, l, b, g);
          const double res = eigen_residual(s.field, eq, s.entry.energy);
          const double nominal = std::abs(b) * s.entry.nominal_level;
          r.rows.push_back({std::to_string(m), std::to_string(l), std::to_string(s.entry.level), cell(s.entry.energy),
                            cell(nominal), cell(res), cell(eigen_residual(s.field, eq, nominal))});
          r.check(res < tol, "eigen-residual of (m, l)=(" + std::to_string(m) + ", " + std::to_string(l) + ")");
        }
      }
      return r;
    };
  }
  throw ConfigError(name + ".family '" + family + "' is unknown (oscillator, landau)");
}

Job thresholds(const Params& p, const std::string& name) {
  const ThresholdKindT kind = threshold_kind_from(p.str("threshold"));
  ThresholdParams tp;
  tp.T = p.num("T", 1.0);
  tp.omega = p.num("omega", 0.0);
  tp.nu = p.num("nu", 0.0);
  tp.b = p.num("b", 0.0);
  threshold(kind, tp);
  std::vector<double> alpha = p.nums("alpha");
  std::vector<double> beta = p.nums("beta");
  if (alpha.size() == 1 && beta.size() > 1) alpha.assign(beta.size(), alpha[0]);
  if (beta.size() == 1 && alpha.size() > 1) beta.assign(alpha.size(), beta[0]);
  if (alpha.size() != beta.size()) throw ConfigError(name + ": alpha and beta lists differ in length");
  for (double v : alpha) {
    if (!(v > 0.0)) throw ConfigError(name + ".alpha must be positive");
  }
  for (double v : beta) {
    if (!(v > 0.0)) throw ConfigError(name + ".beta must be positive");
  }
  const std::string expect = p.str("expect", "");

  return [=] {
    Report r;
    r.name = name;
    r.header = {"alpha", "beta", "product", "threshold", "classification"};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const auto v = classify(alpha[i] * alpha[i], beta[i] * beta[i], kind, tp);
      r.rows.push_back({cell(alpha[i]), cell(beta[i]), cell(v.product), cell(v.threshold), to_string(v.classification)});
      if (!expect.empty()) r.check(to_string(v.classification) == expect, "classification is " + expect);
    }
    r.summary["kind"] = to_string(kind);
    r.summary["threshold"] = threshold(kind, tp);
    return r;
  };
}

Job decay_fit(const Params& p, const std::string& name, std::uint64_t seed) {
  const GridSpec g = grid_from(p, GridSpec{1, 20.0, 1024});
  const WaveField u = p.has("input") ? io::read_snapshot(p.str("input")) : data_from(p.sub("data"), g);
  FitOptions fo = fit_options_from(p);
  if (!p.has("relative_floor")) fo.relative_floor = 1e-10;
  const bool fourier = p.flag("fourier", true);
  const std::vector<double> alpha2 = p.nums("alpha2", {});
  const double noise = p.num("noise_floor", 0.0);
  const int jitter = p.integer("jitter", 0);
  const std::uint64_t s = static_cast<std::uint64_t>(p.integer("seed", static_cast<int>(seed)));
  if (jitter > 0 && !(fo.r_max > fo.r_min && fo.r_min >= 0.0)) {
    throw ConfigError(name + ": jitter needs an explicit window r_min < r_max");
  }

  return [=] {
    Report r;
    r.name = name;
    r.header = {"probe", "parameter", "value", "extra", "trusted"};
    const auto f = fit_rate(u, fo);
    r.rows.push_back({"space_fit", "", cell(f.rate), cell(f.poly_correction), cell(f.trusted)});
    r.summary["space_fit"] = io::to_json(f);
    if (fourier) {
      const auto h = fourier_decay(u);
      r.rows.push_back({"fourier_fit", "", cell(h.rate), cell(alpha_sq_from_fourier_rate(h.rate)), cell(h.trusted)});
      r.summary["fourier_fit"] = io::to_json(h);
    }
    for (double a2 : alpha2) {
      const auto w = weighted_norm(u, a2, noise);
      r.rows.push_back({"weighted_norm", cell(a2), cell(w.divergent ? INFINITY : w.value), cell(w.divergent), ""});
      r.summary["weighted_norms"].push_back(io::to_json(w));
    }
    if (jitter > 0) {
      std::mt19937_64 rng(s);
      std::uniform_real_distribution<double> d(-0.05, 0.05);
      for (int i = 0; i < jitter; ++i) {
        FitOptions jo = fo;
        jo.r_min = fo.r_min * (1.0 + d(rng));
        jo.r_max = fo.r_max * (1.0 + d(rng));
        const auto j = fit_rate(u, jo);
        r.rows.push_back({"jitter_fit", std::to_string(i), cell(j.rate), cell(j.poly_correction), cell(j.trusted)});
      }
      r.summary["seed"] = s;
    }
    return r;
  };
}

Job hardy_free(const Params& p, const std::string& name) {
  const GridSpec g = grid_from(p, GridSpec{1, 20.0, 1024});
  const std::vector<double> times = p.nums("T", {0.25, 0.5, 1.0});
  for (double T : times) {
    if (!(T > 0.0)) throw ConfigError(name + ".T values must be positive");
  }
  const double upper = p.num("upper", 1.001);
  FitOptions fo;
  fo.fixed_poly = 0.0;
  fo.relative_floor = p.num("relative_floor", 1e-4);
  fo.start_fraction = 1.0;

  return [=] {
    Report r;
    r.name = name;
    r.header = {"T", "beta_sq", "alpha_sq", "alpha_beta", "ratio_to_4T", "classification"};
    for (double T : times) {
      // chirped data e^{-a0|x|^2} with a0 = 1/(4T) - i/(4T) focus the free flow at the threshold
      const cplx a0(1.0 / (4.0 * T), -1.0 / (4.0 * T));
      const auto u0 = sample(g, [&](const Point& x) { return std::exp(-a0 * x.squaredNorm()); });
      const auto uT = free_propagate(u0, T);
      const double b2 = 1.0 / fit_rate(u0, fo).rate;
      const double a2 = 1.0 / fit_rate(uT, fo).rate;
      const double ab = std::sqrt(a2 * b2);
      const auto v = classify(a2, b2, ThresholdKindT::free_4T, ThresholdParams{T});
      const double ratio = ab / (4.0 * T);
      r.rows.push_back({cell(T), cell(b2), cell(a2), cell(ab), cell(ratio), to_string(v.classification)});
      r.check(ratio >= 1.0 - kAtThresholdTolerance && ratio <= upper, "alpha*beta/4T in [1, " + cell(upper) + "] at T=" + cell(T));
      r.check(v.classification != Classification::below_threshold, "not below threshold at T=" + cell(T));
    }
    return r;
  };
}

}  // namespace

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> k = {"verify-closed-form", "simulate", "transform", "gauge",
                                             "eigen",              "thresholds", "decay-fit", "hardy-free"};
  return k;
}

Scenario prepare(const Params& p, std::uint64_t seed) {
  Scenario s;
  s.kind = p.str("kind");
  s.name = p.str("name", s.kind);
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError(p.where() + ".name must be a plain file stem");
  }
  if (s.kind == "verify-closed-form") {
    s.job = verify_closed_form(p, s.name);
  } else if (s.kind == "simulate") {
    s.job = simulate(p, s.name);
  } else if (s.kind == "transform") {
    s.job = transform(p, s.name);
  } else if (s.kind == "gauge") {
    s.job = gauge(p, s.name);
  } else if (s.kind == "eigen") {
    s.job = eigen(p, s.name);
  } else if (s.kind == "thresholds") {
    s.job = thresholds(p, s.name);
  } else if (s.kind == "decay-fit") {
    s.job = decay_fit(p, s.name, seed);
  } else if (s.kind == "hardy-free") {
    s.job = hardy_free(p, s.name);
  } else {
    throw ConfigError(p.where() + ".kind '" + s.kind + "' is unknown");
  }
  p.finish();
  const Job inner = s.job;
  const std::string name = s.name, kind = s.kind;
  s.job = [inner, name, kind] {
    Report r = inner();
    r.name = name;
    r.kind = kind;
    return r;
  };
  return s;
}

std::vector<Report> execute(const std::vector<Scenario>& scenarios, int jobs) {
  std::vector<Report> out(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      const auto& s = scenarios[i];
      spdlog::info("{}: start ({})", s.name, s.kind);
      try {
        out[i] = s.job();
      } catch (const std::exception& e) {
        out[i] = Report{};
        out[i].name = s.name;
        out[i].kind = s.kind;
        out[i].check(false, std::string("error: ") + e.what());
      }
      spdlog::info("{}: {}", s.name, out[i].pass ? "pass" : "FAIL");
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

void write_outputs(const std::string& dir, const std::vector<Report>& reports, const nlohmann::json& header) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json summary = header;
  summary["scenarios"] = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    if (!r.header.empty()) {
      io::CsvWriter csv(fs::path(dir) / (r.name + ".csv"), r.header);
      for (const auto& row : r.rows) csv.row(row);
    }
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [label, field] : r.snapshots) {
      const std::string file = r.name + "_" + label + ".bin";
      io::write_snapshot(fs::path(dir) / file, field, {{"scenario", r.name}, {"label", label}});
      files.push_back(file);
    }
    summary["scenarios"].push_back({{"name", r.name},
                                    {"kind", r.kind},
                                    {"pass", r.pass},
                                    {"failures", r.failures},
                                    {"csv", r.header.empty() ? "" : r.name + ".csv"},
                                    {"snapshots", files},
                                    {"summary", r.summary}});
    all = all && r.pass;
  }
  summary["pass"] = all;
  io::write_json(fs::path(dir) / "summary.json", summary);
}

}  // namespace gd::cli
