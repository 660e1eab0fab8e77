#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gaussdecay/core.hpp"
#include "params.hpp"
#include "scenarios.hpp"

using namespace gd;
using namespace gd::cli;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

void put(toml::table& t, const std::string& key, double v) { t.insert_or_assign(key, v); }
void put(toml::table& t, const std::string& key, int v) { t.insert_or_assign(key, static_cast<int64_t>(v)); }
void put(toml::table& t, const std::string& key, bool v) { t.insert_or_assign(key, v); }
void put(toml::table& t, const std::string& key, const std::string& v) { t.insert_or_assign(key, v); }
void put(toml::table& t, const std::string& key, const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  t.insert_or_assign(key, std::move(a));
}

toml::table& subtable(toml::table& t, const std::string& key) {
  if (!t.contains(key)) t.insert(key, toml::table{});
  return *t[key].as_table();
}

/// Collects subcommand options and copies the ones given on the command line
/// into a scenario table. "grid.L" style keys land in sub-tables.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<T>();
    CLI::Option* o = app_->add_option(flag, *v, help);
    fill_.push_back([v, o, key](toml::table& t) {
      if (!o->count()) return;
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        put(t, key, *v);
      } else {
        put(subtable(t, key.substr(0, dot)), key.substr(dot + 1), *v);
      }
    });
    return o;
  }

  CLI::Option* flag(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<bool>(false);
    CLI::Option* o = app_->add_flag(flag, *v, help);
    fill_.push_back([v, o, key](toml::table& t) {
      if (o->count()) put(t, key, *v);
    });
    return o;
  }

  /// `name{k=v, ...}` strings become sub-tables.
  CLI::Option* registry(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<std::string>();
    CLI::Option* o = app_->add_option(flag, *v, help);
    fill_.push_back([v, o, key](toml::table& t) {
      if (o->count()) t.insert_or_assign(key, parse_registry(*v));
    });
    return o;
  }

  CLI::Option* registry_list(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<std::vector<std::string>>();
    CLI::Option* o = app_->add_option(flag, *v, help);
    fill_.push_back([v, o, key](toml::table& t) {
      if (!o->count()) return;
      toml::array a;
      for (const auto& s : *v) a.push_back(parse_registry(s));
      t.insert_or_assign(key, std::move(a));
    });
    return o;
  }

  void grid(int default_dim) {
    add<int>("--n", "grid.n", "Spatial dimension")->default_str(std::to_string(default_dim));
    add<double>("--L", "grid.L", "Box half-width: x_j = -L + j dx");
    add<int>("--N", "grid.N", "Points per axis (even)");
  }

  toml::table table(const std::string& kind) const {
    toml::table t;
    t.insert("kind", kind);
    t.insert("name", kind);
    for (const auto& f : fill_) f(t);
    return t;
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::function<void(toml::table&)>> fill_;
};

void print_table(const Report& r) {
  std::vector<std::size_t> width(r.header.size(), 0);
  for (std::size_t i = 0; i < r.header.size(); ++i) width[i] = r.header[i].size();
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      s += cells[i];
      if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    std::puts(s.c_str());
  };
  line(r.header);
  for (const auto& row : r.rows) line(row);
}

int finish(const std::vector<Report>& reports, const std::string& out_dir, const nlohmann::json& header,
           bool tables) {
  bool all = true;
  for (const auto& r : reports) {
    if (tables) print_table(r);
    std::printf("scenario %-24s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL");
    for (const auto& f : r.failures) std::printf("    %s\n", f.c_str());
    all = all && r.pass;
  }
  if (!out_dir.empty()) write_outputs(out_dir, reports, header);
  return all ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-decay scenarios for Schrodinger evolutions"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config, out_dir, log_level = "info";
  int jobs = 1;
  app.add_option("--config", config, "TOML file with a [[scenario]] array")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Directory for CSV, JSON and snapshot outputs");
  app.add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  std::vector<std::unique_ptr<Binder>> binders;
  auto sub = [&](const std::string& name, const std::string& help) {
    binders.push_back(std::make_unique<Binder>(app.add_subcommand(name, help)));
    return binders.back().get();
  };

  CLI::App* run = app.add_subcommand("run", "Run every scenario of --config");

  Binder* b = sub("verify-closed-form", "Residual, endpoint rates and weighted-norm report of the closed-form pair");
  b->add<double>("--omega", "omega", "omega in (0, pi)");
  b->add<int>("--n", "n", "Dimension");
  b->add<double>("--k", "k", "Power k > n/2 (k > 4 with --magnetic)");
  b->add<std::string>("--branch", "branch", "plus or minus");
  b->flag("--magnetic", "magnetic", "Uniform magnetic version (n = 2)");
  b->add<int>("--times", "times", "Number of sampled times");
  b->add<double>("--t-max", "t_max", "Times are sampled in [-t_max, t_max]");
  b->add<double>("--tolerance", "tolerance", "Residual tolerance");
  b->add<double>("--L", "grid.L", "Box half-width");
  b->add<int>("--N", "grid.N", "Points per axis");

  b = sub("simulate", "Propagate data and probe decay and oracle agreement");
  b->registry("--equation", "equation", "e.g. harmonic{omega=1,T=0.5}")->required();
  b->registry("--data", "data", "e.g. gaussian{beta2=2}")->required();
  b->add<std::vector<double>>("--times", "times", "Probe times")->required();
  b->add<double>("--dt", "dt", "Step size");
  b->add<std::string>("--oracle", "oracle", "auto, none, harmonic, magnetic or free");
  b->add<double>("--tolerance", "tolerance", "Oracle tolerance (relative L2)");
  b->flag("--snapshot", "snapshot", "Write a snapshot at every probe time");
  b->grid(1);

  b = sub("transform", "Apply a transform chain to a stored field");
  b->add<std::string>("--input", "input", "Snapshot file")->required();
  b->add<double>("--time", "time", "Override the snapshot time");
  b->registry_list("--chain", "chain", "Transforms in order, e.g. harmonic_removal{omega=1,T=0.5}")->required();
  b->add<double>("--tolerance", "tolerance", "Round-trip tolerance");

  b = sub("gauge", "Transversal-gauge reduction report");
  b->registry("--field", "field", "uniform{b=1}, pure_gradient or transverse_plus_gradient")->required();
  b->add<double>("--t", "t", "Time slice");
  b->grid(2);

  b = sub("eigen", "Oscillator or Landau spectrum with eigen-residuals");
  b->add<std::string>("--family", "family", "oscillator or landau");
  b->add<double>("--omega", "omega", "Oscillator frequency");
  b->add<double>("--b", "b", "Field strength");
  b->add<int>("--max-m", "max_m", "Largest m");
  b->add<int>("--max-l", "max_l", "Largest |l| (landau)");
  b->add<double>("--L", "grid.L", "Box half-width");
  b->add<int>("--N", "grid.N", "Points per axis");

  b = sub("thresholds", "Classify alpha*beta against the sharp thresholds");
  b->add<std::string>("--kind", "threshold", "free, harmonic, repulsive or magnetic")->required();
  b->add<double>("--T", "T", "Time span");
  b->add<double>("--omega", "omega", "Oscillator frequency");
  b->add<double>("--nu", "nu", "Repulsive frequency");
  b->add<double>("--b", "b", "Field strength");
  b->add<std::vector<double>>("--alpha", "alpha", "alpha values")->required();
  b->add<std::vector<double>>("--beta", "beta", "beta values")->required();
  b->add<std::string>("--expect", "expect", "Fail unless every row has this classification");

  b = sub("decay-fit", "Gaussian decay fit of a stored field");
  b->add<std::string>("--input", "input", "Snapshot file")->required();
  b->add<std::vector<double>>("--alpha2", "alpha2", "alpha^2 values for weighted norms");
  b->add<double>("--noise-floor", "noise_floor", "Relative noise floor for weighted norms");
  b->add<double>("--r-min", "r_min", "Fit window start");
  b->add<double>("--r-max", "r_max", "Fit window end");
  b->add<double>("--fixed-poly", "fixed_poly", "Fix the power of r");
  b->add<int>("--jitter", "jitter", "Refits with the window jittered by up to 5%");
  b->add<int>("--seed", "seed", "Seed for the jitter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  auto logger = spdlog::stderr_color_mt("gaussdecay");
  logger->set_pattern("%^[%l]%$ %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  const auto chosen = app.get_subcommands();
  try {
    if (chosen.empty() || chosen.front() == run) {
      if (config.empty()) {
        std::cerr << app.help() << "\nerror: --config is required to run scenarios\n";
        return kExitConfig;
      }
      toml::table doc;
      try {
        doc = toml::parse_file(config);
      } catch (const toml::parse_error& e) {
        std::cerr << "error: " << config << ":" << e.source().begin.line << ": " << e.description() << "\n";
        return kExitConfig;
      }
      const Params root = Params::owning(std::move(doc), std::filesystem::path(config).filename().string());
      const auto seed = static_cast<std::uint64_t>(root.integer("seed", 0));
      const std::string config_out = root.str("out_dir", "out");
      if (out_dir.empty()) out_dir = config_out;
      std::vector<Scenario> scenarios;
      std::set<std::string> names;
      for (const auto& s : root.list("scenario")) {
        scenarios.push_back(prepare(s, seed));
        if (!names.insert(scenarios.back().name).second) {
          throw ConfigError("scenario name '" + scenarios.back().name + "' is used twice");
        }
      }
      root.finish();
      spdlog::info("{} scenario(s) from {}", scenarios.size(), config);
      const nlohmann::json header = {{"config", std::filesystem::path(config).filename().string()}, {"seed", seed}};
      return finish(execute(scenarios, jobs), out_dir, header, false);
    }
    const std::string kind = chosen.front()->get_name();
    for (const auto& bd : binders) {
      if (bd->app() != chosen.front()) continue;
      toml::table t = bd->table(kind);
      const Params p = Params::owning(std::move(t), kind);
      const Scenario s = prepare(p, 0);
      const nlohmann::json header = {{"command", kind}, {"seed", 0}};
      return finish(execute({s}, 1), out_dir, header, true);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridError& e) {
    std::cerr << "grid: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RangeError& e) {
    std::cerr << "range: " << e.what() << "\n";
    return kExitConfig;
  }
}
