#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace placebeb {

// Minutes in a year (365.25 days); used to turn lifetime capital costs into
// per-minute rates.
inline constexpr double kMinutesPerYear = 525960.0;

inline double per_minute_rate(double capital_usd, double lifetime_years) {
  return capital_usd / (lifetime_years * kMinutesPerYear);
}

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct ChargerType {
  int id = 0;
  std::string name;
  double power_kw = 0.0;
  double unit_cost_rate = 0.0;  // currency per minute per installed charger
  double service_rate = 0.0;    // vehicles per minute, 1 / recharge_time
  double recharge_time = 0.0;   // minutes
};

struct DemandPoint {
  std::string id;
  GeoPoint location;
  double rate = 0.0;                    // arrivals per minute
  std::vector<int> reachable_stations;  // station indices, ascending
  std::string agency;
};

struct CandidateStation {
  std::string id;
  GeoPoint location;
  double fixed_cost_rate = 0.0;    // currency per minute while active
  std::vector<int> served_demands;  // inverse image of reachable_stations
  std::vector<int> max_chargers;    // per charger type
  bool is_garage = false;
  std::string agency;
};

struct CostRates {
  double travel = 0.0;  // currency per minute of travel
  double wait = 0.0;    // currency per minute of queueing plus charging
};

struct BatterySpec {
  double capacity_kwh = 0.0;
  double soc_start_pct = 0.0;
  double soc_end_pct = 0.0;
};

struct InstanceOptions {
  double epsilon = 1e-6;
  bool enforce_proximity = false;
  double speed_kmh = 30.0;
  std::optional<double> max_travel_minutes;
};

// Raw, mutable problem data. Wrap in Instance to validate and freeze it.
struct InstanceData {
  std::vector<DemandPoint> demand_points;
  std::vector<CandidateStation> stations;
  std::vector<ChargerType> charger_types;
  // travel_time[i][j] in minutes; +infinity where j is not reachable from i.
  std::vector<std::vector<double>> travel_time;
  CostRates costs;
  InstanceOptions options;
  std::optional<BatterySpec> battery;
};

// Validated, immutable instance. Reachability is taken from each demand
// point's reachable_stations; served_demands is rebuilt as its exact inverse.
class Instance {
 public:
  explicit Instance(InstanceData data);

  const InstanceData& data() const { return data_; }

  int num_demands() const { return static_cast<int>(data_.demand_points.size()); }
  int num_stations() const { return static_cast<int>(data_.stations.size()); }
  int num_charger_types() const { return static_cast<int>(data_.charger_types.size()); }

  const DemandPoint& demand(int i) const { return data_.demand_points[i]; }
  const CandidateStation& station(int j) const { return data_.stations[j]; }
  const ChargerType& charger(int k) const { return data_.charger_types[k]; }
  const std::vector<DemandPoint>& demand_points() const { return data_.demand_points; }
  const std::vector<CandidateStation>& stations() const { return data_.stations; }
  const std::vector<ChargerType>& charger_types() const { return data_.charger_types; }

  double travel_time(int i, int j) const { return data_.travel_time[i][j]; }
  bool reachable(int i, int j) const;
  int max_chargers(int j, int k) const { return data_.stations[j].max_chargers[k]; }

  const CostRates& costs() const { return data_.costs; }
  double epsilon() const { return data_.options.epsilon; }
  bool enforce_proximity() const { return data_.options.enforce_proximity; }
  double total_rate() const;

 private:
  InstanceData data_;
};

struct Assignment {
  int demand = 0;
  int station = 0;
  int charger = 0;

  auto operator<=>(const Assignment&) const = default;
};

struct CostBreakdown {
  double station = 0.0;
  double charger = 0.0;
  double travel = 0.0;
  double waiting = 0.0;
  double total = 0.0;
  // q_ijk for each assignment, aligned with Solution::assignments.
  std::vector<double> per_assignment;
};

struct Solution {
  std::vector<int> active;               // station indices with y_j = 1, ascending
  std::vector<Assignment> assignments;   // one per demand, ordered by demand
  std::vector<std::vector<int>> chargers;  // [station][type] -> s_jk
  std::vector<std::vector<double>> waits;  // [station][type] -> W_jk, 0 where s_jk = 0
  CostBreakdown cost;
};

// Aggregate arrival rate per (station, type).
std::vector<std::vector<double>> station_loads(const Instance& instance,
                                               const std::vector<Assignment>& assignments);

// Objective value of a solution. Throws Unassigned if a demand has no
// assignment and UnstableQueue if any (station, type) violates the stability
// margin mu s (1 - eps) >= load.
CostBreakdown evaluate(const Instance& instance, const Solution& solution);

// Fills waits and cost from active/assignments/chargers.
Solution complete_solution(const Instance& instance, std::vector<int> active,
                           std::vector<Assignment> assignments,
                           std::vector<std::vector<int>> chargers);

// Same, with the active set taken as the stations that receive traffic.
Solution complete_solution(const Instance& instance, std::vector<Assignment> assignments,
                           std::vector<std::vector<int>> chargers);

enum class Constraint {
  ActiveIfVisited,  // x_ijk <= y_j
  SingleSourcing,   // each demand assigned exactly once
  Stability,        // mu_k s_jk (1 - eps) >= load
  WaitDefinition,   // W_jk >= expected wait
  Domain,           // index, integrality, sign and capacity violations
  Proximity,        // assigned to the closest active station
};

const char* to_string(Constraint c) noexcept;

struct Violation {
  Constraint constraint = Constraint::Domain;
  int demand = -1;
  int station = -1;
  int charger = -1;
  std::string detail;
};

// Every violated constraint instance; empty for a feasible solution. The
// proximity rule is checked when enforce_proximity (default: the instance
// option) is set.
std::vector<Violation> check_feasibility(const Instance& instance, const Solution& solution,
                                         std::optional<bool> enforce_proximity = std::nullopt);

// Recharge time 60 * B * (soc_end - soc_start) / 100 / P minutes for each
// type, with service_rate its reciprocal. SOC bounds are percentages.
std::vector<ChargerType> derive_service_rates(double battery_kwh, double soc_start_pct,
                                              double soc_end_pct,
                                              std::vector<ChargerType> charger_types);

}  // namespace placebeb
