#pragma once

// Case-study drivers: the joint/separate x station-regime scenario matrix and
// one-at-a-time parameter sweeps.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "placebeb/model.hpp"
#include "placebeb/report.hpp"

namespace placebeb::studies {

using Solver = std::function<SolverReport(const Instance&)>;

enum class StationRegime { GarageOnly, OtherOnly, Mixed };

struct ScenarioSpec {
  bool joint = true;  // agencies share stations and chargers
  StationRegime regime = StationRegime::Mixed;

  std::string name() const;
};

// Joint rows first, each in the order garage-only, other-only, mixed.
std::vector<ScenarioSpec> scenario_matrix();

// Restriction to the demands and stations passing the filters; nullopt when
// a kept demand loses every reachable station.
std::optional<Instance> subset_instance(const Instance& instance,
                                        const std::function<bool(const DemandPoint&)>& keep_demand,
                                        const std::function<bool(const CandidateStation&)>& keep_station);

struct ScenarioResult {
  ScenarioSpec spec;
  std::string status;  // "ok" or the failure reason
  double cost = 0.0;
  double pct_increase = 0.0;  // vs the joint-mixed row
  int stations = 0;
  std::vector<int> chargers_by_type;
  double mean_wait = 0.0;
  double mean_utilization = 0.0;

  bool ok() const { return status == "ok"; }
};

// Separate mode solves one sub-instance per demand agency using only that
// agency's stations and sums the results.
std::vector<ScenarioResult> run_scenarios(const Instance& instance, const Solver& solve);
std::string scenarios_csv(const std::vector<ScenarioResult>& rows,
                          const std::vector<ChargerType>& charger_types);

enum class SweepParameter { WaitCost, ChargerPower, StationCost, ChargerCost };

SweepParameter parse_sweep_parameter(const std::string& name);
const char* to_string(SweepParameter p) noexcept;
std::vector<double> default_multipliers(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::WaitCost;
  std::vector<double> multipliers;
};

// Scales one parameter. Charger power re-derives service rates from the
// instance battery when present, otherwise scales them in proportion.
Instance apply_multiplier(const Instance& instance, SweepParameter p, double multiplier);

struct SweepRow {
  double multiplier = 1.0;
  std::string status;
  double cost = 0.0;
  double pct_change = 0.0;  // vs multiplier 1
};

std::vector<SweepRow> run_sweep(const Instance& instance, const SweepSpec& sweep,
                                const Solver& solve);
std::string sweep_csv(const SweepSpec& sweep, const std::vector<SweepRow>& rows);

}  // namespace placebeb::studies
