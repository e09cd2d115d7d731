#include "placebeb/studies.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "placebeb/error.hpp"
#include "placebeb/io.hpp"

namespace placebeb::studies {

std::string ScenarioSpec::name() const {
  std::string r = joint ? "joint" : "separate";
  switch (regime) {
    case StationRegime::GarageOnly: return r + "-garage";
    case StationRegime::OtherOnly: return r + "-other";
    case StationRegime::Mixed: return r + "-mixed";
  }
  return r;
}

std::vector<ScenarioSpec> scenario_matrix() {
  std::vector<ScenarioSpec> out;
  for (bool joint : {true, false}) {
    for (auto regime : {StationRegime::GarageOnly, StationRegime::OtherOnly, StationRegime::Mixed}) {
      out.push_back({joint, regime});
    }
  }
  return out;
}

std::optional<Instance> subset_instance(
    const Instance& instance, const std::function<bool(const DemandPoint&)>& keep_demand,
    const std::function<bool(const CandidateStation&)>& keep_station) {
  const auto& src = instance.data();
  InstanceData data;
  data.charger_types = src.charger_types;
  data.costs = src.costs;
  data.options = src.options;
  data.battery = src.battery;

  std::vector<int> new_index(src.stations.size(), -1);
  for (std::size_t j = 0; j < src.stations.size(); ++j) {
    if (!keep_station(src.stations[j])) continue;
    new_index[j] = static_cast<int>(data.stations.size());
    data.stations.push_back(src.stations[j]);
  }
  for (std::size_t i = 0; i < src.demand_points.size(); ++i) {
    if (!keep_demand(src.demand_points[i])) continue;
    DemandPoint p = src.demand_points[i];
    p.reachable_stations.clear();
    std::vector<double> row(data.stations.size(), std::numeric_limits<double>::infinity());
    for (int j : src.demand_points[i].reachable_stations) {
      if (new_index[j] < 0) continue;
      p.reachable_stations.push_back(new_index[j]);
      row[new_index[j]] = src.travel_time[i][j];
    }
    if (p.reachable_stations.empty()) return std::nullopt;
    data.demand_points.push_back(std::move(p));
    data.travel_time.push_back(std::move(row));
  }
  return Instance(std::move(data));
}

namespace {

bool regime_allows(StationRegime r, const CandidateStation& s) {
  switch (r) {
    case StationRegime::GarageOnly: return s.is_garage;
    case StationRegime::OtherOnly: return !s.is_garage;
    case StationRegime::Mixed: return true;
  }
  return true;
}

struct Tally {
  double cost = 0.0;
  int stations = 0;
  std::vector<int> chargers;
  std::vector<double> waits;
  std::vector<double> utilization;

  void add(const Instance& inst, const Solution& sol) {
    cost += sol.cost.total;
    stations += static_cast<int>(sol.active.size());
    chargers.resize(inst.num_charger_types(), 0);
    const auto loads = station_loads(inst, sol.assignments);
    for (int j = 0; j < inst.num_stations(); ++j) {
      for (int k = 0; k < inst.num_charger_types(); ++k) {
        const int s = sol.chargers[j][k];
        chargers[k] += s;
        if (s == 0 || loads[j][k] <= 0.0) continue;
        waits.push_back(sol.waits[j][k]);
        utilization.push_back(loads[j][k] / (inst.charger(k).service_rate * s));
      }
    }
  }
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

ScenarioResult solve_scenario(const Instance& instance, const ScenarioSpec& spec,
                              const Solver& solve) {
  ScenarioResult row;
  row.spec = spec;
  row.chargers_by_type.assign(instance.num_charger_types(), 0);
  const auto regime = subset_instance(
      instance, [](const DemandPoint&) { return true; },
      [&](const CandidateStation& s) { return regime_allows(spec.regime, s); });
  if (!regime) {
    row.status = "infeasible: demand without reachable station";
    return row;
  }

  Solution plan;
  try {
    if (spec.joint) {
      plan = solve(*regime).best;
    } else {
      // Per-agency plans merged and priced on the shared instance, so a plan
      // identical to the joint one gets a bit-identical cost.
      std::map<std::string, int> demand_index, station_index;
      for (int i = 0; i < regime->num_demands(); ++i) demand_index[regime->demand(i).id] = i;
      for (int j = 0; j < regime->num_stations(); ++j) station_index[regime->station(j).id] = j;
      std::vector<int> active;
      std::vector<Assignment> assignments;
      std::vector<std::vector<int>> chargers(regime->num_stations(),
                                             std::vector<int>(regime->num_charger_types(), 0));
      std::set<std::string> agencies;
      for (const auto& d : regime->demand_points()) agencies.insert(d.agency);
      for (const auto& agency : agencies) {
        auto sub = subset_instance(
            *regime, [&](const DemandPoint& d) { return d.agency == agency; },
            [&](const CandidateStation& s) { return s.agency == agency; });
        if (!sub) {
          row.status = "infeasible: demand without reachable station";
          return row;
        }
        const auto best = solve(*sub).best;
        for (int j : best.active) active.push_back(station_index.at(sub->station(j).id));
        for (const auto& a : best.assignments) {
          assignments.push_back({demand_index.at(sub->demand(a.demand).id),
                                 station_index.at(sub->station(a.station).id), a.charger});
        }
        for (int j = 0; j < sub->num_stations(); ++j) {
          chargers[station_index.at(sub->station(j).id)] = best.chargers[j];
        }
      }
      std::sort(active.begin(), active.end());
      std::sort(assignments.begin(), assignments.end());
      plan = complete_solution(*regime, std::move(active), std::move(assignments),
                               std::move(chargers));
    }
  } catch (const Error& e) {
    row.status = std::string("infeasible: ") + e.what();
    return row;
  }
  Tally tally;
  tally.chargers.assign(instance.num_charger_types(), 0);
  tally.add(*regime, plan);
  row.status = "ok";
  row.cost = tally.cost;
  row.stations = tally.stations;
  row.chargers_by_type = tally.chargers;
  row.mean_wait = mean(tally.waits);
  row.mean_utilization = mean(tally.utilization);
  return row;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<ScenarioResult> run_scenarios(const Instance& instance, const Solver& solve) {
  std::vector<ScenarioResult> rows;
  for (const auto& spec : scenario_matrix()) rows.push_back(solve_scenario(instance, spec, solve));
  double base = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (r.spec.joint && r.spec.regime == StationRegime::Mixed && r.ok()) base = r.cost;
  }
  for (auto& r : rows) {
    r.pct_increase = r.ok() ? 100.0 * (r.cost - base) / base
                            : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

std::string scenarios_csv(const std::vector<ScenarioResult>& rows,
                          const std::vector<ChargerType>& charger_types) {
  std::ostringstream out;
  out << "scenario,joint,stations,status,cost,pct_increase,sum_y";
  for (const auto& k : charger_types) out << ",sum_s_" << k.name;
  out << ",mean_wait,mean_utilization\n";
  for (const auto& r : rows) {
    const char* regime = r.spec.regime == StationRegime::GarageOnly  ? "garage"
                         : r.spec.regime == StationRegime::OtherOnly ? "other"
                                                                     : "mixed";
    out << r.spec.name() << ',' << (r.spec.joint ? "true" : "false") << ',' << regime << ','
        << csv_escape(r.status) << ',' << io::format_double(r.ok() ? r.cost : std::nan(""))
        << ',' << io::format_double(r.pct_increase) << ',' << r.stations;
    for (std::size_t k = 0; k < charger_types.size(); ++k) {
      out << ',' << (k < r.chargers_by_type.size() ? r.chargers_by_type[k] : 0);
    }
    out << ',' << io::format_double(r.mean_wait) << ',' << io::format_double(r.mean_utilization)
        << '\n';
  }
  return out.str();
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "wait_cost") return SweepParameter::WaitCost;
  if (name == "charger_power") return SweepParameter::ChargerPower;
  if (name == "station_cost") return SweepParameter::StationCost;
  if (name == "charger_cost") return SweepParameter::ChargerCost;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name + "'");
}

const char* to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::WaitCost: return "wait_cost";
    case SweepParameter::ChargerPower: return "charger_power";
    case SweepParameter::StationCost: return "station_cost";
    case SweepParameter::ChargerCost: return "charger_cost";
  }
  return "unknown";
}

std::vector<double> default_multipliers(SweepParameter p) {
  switch (p) {
    case SweepParameter::WaitCost: return {2, 4, 6, 8, 10};
    case SweepParameter::ChargerPower: return {1.2, 1.4, 1.6, 1.8};
    case SweepParameter::StationCost: return {1.1, 1.3, 1.5, 2, 3};
    case SweepParameter::ChargerCost: return {0.8, 0.6, 0.4, 0.2};
  }
  return {};
}

Instance apply_multiplier(const Instance& instance, SweepParameter p, double multiplier) {
  if (!(multiplier > 0.0)) throw Error(ErrorCode::InvalidArgument, "multipliers must be > 0");
  auto data = instance.data();
  switch (p) {
    case SweepParameter::WaitCost:
      data.costs.wait *= multiplier;
      break;
    case SweepParameter::StationCost:
      for (auto& s : data.stations) s.fixed_cost_rate *= multiplier;
      break;
    case SweepParameter::ChargerCost:
      for (auto& k : data.charger_types) k.unit_cost_rate *= multiplier;
      break;
    case SweepParameter::ChargerPower:
      for (auto& k : data.charger_types) k.power_kw *= multiplier;
      if (data.battery) {
        data.charger_types =
            derive_service_rates(data.battery->capacity_kwh, data.battery->soc_start_pct,
                                 data.battery->soc_end_pct, std::move(data.charger_types));
      } else {
        for (auto& k : data.charger_types) {
          k.service_rate *= multiplier;
          k.recharge_time = 1.0 / k.service_rate;
        }
      }
      break;
  }
  return Instance(std::move(data));
}

std::vector<SweepRow> run_sweep(const Instance& instance, const SweepSpec& sweep,
                                const Solver& solve) {
  auto attempt = [&](double m) {
    SweepRow row;
    row.multiplier = m;
    try {
      row.cost = solve(m == 1.0 ? instance : apply_multiplier(instance, sweep.parameter, m))
                     .best.cost.total;
      row.status = "ok";
    } catch (const Error& e) {
      row.status = std::string("infeasible: ") + e.what();
      row.cost = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
  };
  const auto base = attempt(1.0);
  std::vector<SweepRow> rows;
  for (double m : sweep.multipliers) {
    auto row = m == 1.0 ? base : attempt(m);
    row.pct_change = 100.0 * (row.cost - base.cost) / base.cost;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const SweepSpec& sweep, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "parameter,multiplier,status,cost,pct_change\n";
  for (const auto& r : rows) {
    out << to_string(sweep.parameter) << ',' << io::format_double(r.multiplier) << ','
        << csv_escape(r.status) << ',' << io::format_double(r.cost) << ','
        << io::format_double(r.pct_change) << '\n';
  }
  return out.str();
}

}  // namespace placebeb::studies
