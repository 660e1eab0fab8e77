#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaussdecay/grid.hpp"
#include "params.hpp"

namespace gd::cli {

/// Outcome of one scenario: a CSV table with one row per probe, a JSON summary
/// and optional field snapshots.
struct Report {
  std::string name;
  std::string kind;
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::pair<std::string, WaveField>> snapshots;

  void check(bool ok, const std::string& what);
};

using Job = std::function<Report()>;

struct Scenario {
  std::string name;
  std::string kind;
  Job job;
};

/// Scenario kinds, which double as subcommand names.
const std::vector<std::string>& scenario_kinds();

/// Reads and validates one scenario table; every guard runs here, before any
/// compute. Throws ConfigError, DomainError or GridError.
Scenario prepare(const Params& p, std::uint64_t seed);

/// Runs the jobs on up to `jobs` threads; reports come back in input order.
/// Exceptions inside a job turn into a failed report.
std::vector<Report> execute(const std::vector<Scenario>& scenarios, int jobs);

/// <dir>/<name>.csv, <dir>/<name>_<label>.bin (+ .json sidecar), <dir>/summary.json.
void write_outputs(const std::string& dir, const std::vector<Report>& reports, const nlohmann::json& header);

}  // namespace gd::cli
