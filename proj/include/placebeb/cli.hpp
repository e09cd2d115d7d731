#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "placebeb/exact.hpp"
#include "placebeb/io.hpp"
#include "placebeb/metaheuristics.hpp"
#include "placebeb/presets.hpp"

namespace placebeb::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInfeasible = 2,
  kParseError = 3,
  kTimeout = 4,
};

// Everything a command needs besides its positional inputs; built from the
// defaults, then --preset, then --config, then explicit flags.
struct Settings {
  std::uint64_t seed = 0;
  std::optional<double> time_limit_s;
  // Size-dependent time limits when no explicit limit is given.
  bool size_scaled_time_limit = false;

  presets::Baseline baseline = presets::transit_baseline();
  int default_max_chargers = 10;
  double max_travel_minutes = 15.0;
  InstanceOptions instance_options;

  SolverConfig exact;
  SAParams sa;
  GAParams ga;
  int n_runs = 1;
  Method study_method = Method::BranchAndBound;
};

void apply_preset(Settings& s, const std::string& name);
void apply_config(Settings& s, const io::Json& config);

// Time limit for an instance: explicit, else size-scaled when enabled.
std::optional<double> time_limit_for(const Settings& s, const Instance& instance);

SolverReport solve(const Instance& instance, Method method, const Settings& settings);

// Maps an exception to the documented exit status.
int exit_code_for(const std::exception& e);

// Full command line without the program name. Output files are written as
// requested; summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace placebeb::cli
