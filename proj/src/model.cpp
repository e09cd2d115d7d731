#include "placebeb/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "placebeb/error.hpp"
#include "placebeb/queueing.hpp"

namespace placebeb {
namespace {

bool satisfies_stability(double load, double service_rate, int servers, double epsilon) {
  return service_rate * servers * (1.0 - epsilon) >= load;
}

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace

Instance::Instance(InstanceData data) : data_(std::move(data)) {
  const auto n_demands = data_.demand_points.size();
  const auto n_stations = data_.stations.size();
  const auto n_types = data_.charger_types.size();

  if (!(data_.options.epsilon > 0.0 && data_.options.epsilon < 1.0)) {
    invalid("epsilon must lie in (0, 1)");
  }
  if (data_.costs.travel < 0.0 || data_.costs.wait < 0.0) invalid("cost rates must be >= 0");
  for (const auto& k : data_.charger_types) {
    if (!(k.power_kw > 0.0)) invalid("charger type " + k.name + ": power must be > 0");
    if (!(k.recharge_time > 0.0)) invalid("charger type " + k.name + ": recharge time must be > 0");
    if (std::abs(k.service_rate * k.recharge_time - 1.0) > 1e-9) {
      invalid("charger type " + k.name + ": service rate must equal 1 / recharge time");
    }
    if (k.unit_cost_rate < 0.0) invalid("charger type " + k.name + ": negative cost");
  }
  if (data_.travel_time.size() != n_demands) invalid("travel matrix row count mismatch");
  for (auto& row : data_.travel_time) {
    if (row.size() != n_stations) invalid("travel matrix column count mismatch");
  }

  for (auto& s : data_.stations) {
    if (s.fixed_cost_rate < 0.0) invalid("station " + s.id + ": negative fixed cost");
    if (s.max_chargers.size() != n_types) {
      invalid("station " + s.id + ": max_chargers needs one entry per charger type");
    }
    for (int cap : s.max_chargers) {
      if (cap < 0) invalid("station " + s.id + ": negative charger capacity");
    }
    s.served_demands.clear();
  }

  for (std::size_t i = 0; i < n_demands; ++i) {
    auto& d = data_.demand_points[i];
    if (!(d.rate > 0.0)) invalid("demand " + d.id + ": rate must be > 0");
    std::sort(d.reachable_stations.begin(), d.reachable_stations.end());
    d.reachable_stations.erase(std::unique(d.reachable_stations.begin(), d.reachable_stations.end()),
                               d.reachable_stations.end());
    for (int j : d.reachable_stations) {
      if (j < 0 || static_cast<std::size_t>(j) >= n_stations) {
        invalid("demand " + d.id + ": reachable station index out of range");
      }
      const double t = data_.travel_time[i][j];
      if (!std::isfinite(t) || t < 0.0) {
        invalid("demand " + d.id + ": travel time to " + data_.stations[j].id +
                " must be finite and >= 0");
      }
      data_.stations[j].served_demands.push_back(static_cast<int>(i));
    }
  }
}

bool Instance::reachable(int i, int j) const {
  const auto& r = data_.demand_points[i].reachable_stations;
  return std::binary_search(r.begin(), r.end(), j);
}

double Instance::total_rate() const {
  double sum = 0.0;
  for (const auto& d : data_.demand_points) sum += d.rate;
  return sum;
}

std::vector<std::vector<double>> station_loads(const Instance& instance,
                                               const std::vector<Assignment>& assignments) {
  std::vector<std::vector<double>> loads(
      instance.num_stations(), std::vector<double>(instance.num_charger_types(), 0.0));
  for (const auto& a : assignments) {
    loads[a.station][a.charger] += instance.demand(a.demand).rate;
  }
  return loads;
}

namespace {

// Shared by evaluate and complete_solution: waits for every (j, k) with
// chargers, plus the cost ledger.
struct Evaluation {
  std::vector<std::vector<double>> waits;
  CostBreakdown cost;
};

Evaluation evaluate_parts(const Instance& instance, const std::vector<int>& active,
                          const std::vector<Assignment>& assignments,
                          const std::vector<std::vector<int>>& chargers) {
  const int n_stations = instance.num_stations();
  const int n_types = instance.num_charger_types();
  if (static_cast<int>(chargers.size()) != n_stations) {
    throw Error(ErrorCode::InvalidArgument, "charger matrix must have one row per station");
  }

  std::vector<int> times_assigned(instance.num_demands(), 0);
  for (const auto& a : assignments) {
    if (a.demand < 0 || a.demand >= instance.num_demands() || a.station < 0 ||
        a.station >= n_stations || a.charger < 0 || a.charger >= n_types) {
      throw Error(ErrorCode::InvalidArgument, "assignment index out of range");
    }
    ++times_assigned[a.demand];
  }
  for (int i = 0; i < instance.num_demands(); ++i) {
    if (times_assigned[i] == 0) {
      throw Error(ErrorCode::Unassigned, "demand " + instance.demand(i).id + " has no assignment",
                  {instance.demand(i).id});
    }
  }

  const auto loads = station_loads(instance, assignments);
  Evaluation out;
  out.waits.assign(n_stations, std::vector<double>(n_types, 0.0));
  auto& cost = out.cost;

  for (int j : active) cost.station += instance.station(j).fixed_cost_rate;

  for (int j = 0; j < n_stations; ++j) {
    for (int k = 0; k < n_types; ++k) {
      const int s = chargers[j][k];
      const double mu = instance.charger(k).service_rate;
      cost.charger += instance.charger(k).unit_cost_rate * s;
      if (loads[j][k] > 0.0 && !satisfies_stability(loads[j][k], mu, s, instance.epsilon())) {
        std::ostringstream msg;
        msg << "station " << instance.station(j).id << " type " << instance.charger(k).name
            << ": load " << loads[j][k] << " exceeds capacity of " << s << " chargers";
        throw Error(ErrorCode::UnstableQueue, msg.str());
      }
      if (s > 0) out.waits[j][k] = queueing::expected_wait({loads[j][k], mu, s});
    }
  }

  const auto& rates = instance.costs();
  cost.per_assignment.reserve(assignments.size());
  for (const auto& a : assignments) {
    const double lambda = instance.demand(a.demand).rate;
    const double travel = lambda * rates.travel * instance.travel_time(a.demand, a.station);
    const double waiting = lambda * rates.wait * out.waits[a.station][a.charger];
    cost.travel += travel;
    cost.waiting += waiting;
    cost.per_assignment.push_back(travel + waiting);
  }
  cost.total = cost.station + cost.charger + cost.travel + cost.waiting;
  return out;
}

}  // namespace

CostBreakdown evaluate(const Instance& instance, const Solution& solution) {
  return evaluate_parts(instance, solution.active, solution.assignments, solution.chargers).cost;
}

Solution complete_solution(const Instance& instance, std::vector<int> active,
                           std::vector<Assignment> assignments,
                           std::vector<std::vector<int>> chargers) {
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  std::sort(assignments.begin(), assignments.end());
  Solution sol;
  auto eval = evaluate_parts(instance, active, assignments, chargers);
  sol.active = std::move(active);
  sol.assignments = std::move(assignments);
  sol.chargers = std::move(chargers);
  sol.waits = std::move(eval.waits);
  sol.cost = std::move(eval.cost);
  return sol;
}

Solution complete_solution(const Instance& instance, std::vector<Assignment> assignments,
                           std::vector<std::vector<int>> chargers) {
  std::vector<int> active;
  for (const auto& a : assignments) active.push_back(a.station);
  return complete_solution(instance, std::move(active), std::move(assignments),
                           std::move(chargers));
}

const char* to_string(Constraint c) noexcept {
  switch (c) {
    case Constraint::ActiveIfVisited: return "active_if_visited";
    case Constraint::SingleSourcing: return "single_sourcing";
    case Constraint::Stability: return "stability";
    case Constraint::WaitDefinition: return "wait_definition";
    case Constraint::Domain: return "domain";
    case Constraint::Proximity: return "proximity";
  }
  return "unknown";
}

std::vector<Violation> check_feasibility(const Instance& instance, const Solution& solution,
                                         std::optional<bool> enforce_proximity) {
  std::vector<Violation> out;
  const int n_demands = instance.num_demands();
  const int n_stations = instance.num_stations();
  const int n_types = instance.num_charger_types();
  auto add = [&out](Constraint c, int i, int j, int k, std::string detail) {
    out.push_back({c, i, j, k, std::move(detail)});
  };

  std::vector<char> is_active(n_stations, 0);
  for (int j : solution.active) {
    if (j < 0 || j >= n_stations) {
      add(Constraint::Domain, -1, j, -1, "active station index out of range");
      continue;
    }
    is_active[j] = 1;
  }

  std::vector<int> times_assigned(n_demands, 0);
  std::vector<std::vector<double>> loads(n_stations, std::vector<double>(n_types, 0.0));
  for (const auto& a : solution.assignments) {
    if (a.demand < 0 || a.demand >= n_demands || a.station < 0 || a.station >= n_stations ||
        a.charger < 0 || a.charger >= n_types) {
      add(Constraint::Domain, a.demand, a.station, a.charger, "assignment index out of range");
      continue;
    }
    ++times_assigned[a.demand];
    loads[a.station][a.charger] += instance.demand(a.demand).rate;
    if (!instance.reachable(a.demand, a.station)) {
      add(Constraint::Domain, a.demand, a.station, a.charger, "station not reachable from demand");
    }
    if (!is_active[a.station]) {
      add(Constraint::ActiveIfVisited, a.demand, a.station, a.charger,
          "assigned to inactive station");
    }
  }
  for (int i = 0; i < n_demands; ++i) {
    if (times_assigned[i] != 1) {
      add(Constraint::SingleSourcing, i, -1, -1,
          "demand assigned " + std::to_string(times_assigned[i]) + " times");
    }
  }

  const bool shape_ok = static_cast<int>(solution.chargers.size()) == n_stations &&
                        static_cast<int>(solution.waits.size()) == n_stations &&
                        std::all_of(solution.chargers.begin(), solution.chargers.end(),
                                    [&](const auto& r) { return static_cast<int>(r.size()) == n_types; }) &&
                        std::all_of(solution.waits.begin(), solution.waits.end(),
                                    [&](const auto& r) { return static_cast<int>(r.size()) == n_types; });
  if (!shape_ok) {
    add(Constraint::Domain, -1, -1, -1, "charger/wait matrices must be stations x types");
    return out;
  }

  for (int j = 0; j < n_stations; ++j) {
    for (int k = 0; k < n_types; ++k) {
      const int s = solution.chargers[j][k];
      const double w = solution.waits[j][k];
      const double mu = instance.charger(k).service_rate;
      if (s < 0) add(Constraint::Domain, -1, j, k, "negative charger count");
      if (s > instance.max_chargers(j, k)) {
        add(Constraint::Domain, -1, j, k, "charger count above station capacity");
      }
      if (w < 0.0 || std::isnan(w)) add(Constraint::Domain, -1, j, k, "negative wait");
      if (loads[j][k] > 0.0 && !satisfies_stability(loads[j][k], mu, std::max(s, 0), instance.epsilon())) {
        add(Constraint::Stability, -1, j, k, "load exceeds mu s (1 - eps)");
        continue;
      }
      if (s >= 1) {
        const double exact = queueing::expected_wait({loads[j][k], mu, s});
        if (w < exact * (1.0 - 1e-12)) {
          add(Constraint::WaitDefinition, -1, j, k, "wait below the M/M/s expected wait");
        }
      }
    }
  }

  if (enforce_proximity.value_or(instance.enforce_proximity())) {
    for (const auto& a : solution.assignments) {
      if (a.demand < 0 || a.demand >= n_demands || a.station < 0 || a.station >= n_stations) continue;
      const double assigned = instance.travel_time(a.demand, a.station);
      for (int j : instance.demand(a.demand).reachable_stations) {
        if (is_active[j] && instance.travel_time(a.demand, j) < assigned) {
          add(Constraint::Proximity, a.demand, a.station, a.charger,
              "closer active station " + instance.station(j).id + " available");
          break;
        }
      }
    }
  }
  return out;
}

std::vector<ChargerType> derive_service_rates(double battery_kwh, double soc_start_pct,
                                              double soc_end_pct,
                                              std::vector<ChargerType> charger_types) {
  if (!(soc_start_pct >= 0.0 && soc_start_pct < soc_end_pct && soc_end_pct <= 100.0)) {
    throw Error(ErrorCode::InvalidSOC, "state of charge bounds must satisfy 0 <= start < end <= 100");
  }
  if (!(battery_kwh > 0.0)) throw Error(ErrorCode::InvalidArgument, "battery capacity must be > 0");
  const double energy_kwh = battery_kwh * (soc_end_pct - soc_start_pct) / 100.0;
  for (auto& k : charger_types) {
    if (!(k.power_kw > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "charger type " + k.name + ": power must be > 0");
    }
    k.recharge_time = 60.0 * energy_kwh / k.power_kw;
    k.service_rate = 1.0 / k.recharge_time;
  }
  return charger_types;
}

}  // namespace placebeb
