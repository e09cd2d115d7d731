#include "placebeb/metaheuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <set>

#include "placebeb/error.hpp"

namespace placebeb {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool out_of_time(const std::optional<double>& limit, Clock::time_point start) {
  return limit && seconds_since(start) >= *limit;
}

struct Candidate {
  std::vector<int> active;  // activation set searched over; may include idle stations
  std::optional<Solution> solution;
  double cost = kInf;
};

class Builder {
 public:
  Builder(const Instance& instance, double p, IncrementWeight weight)
      : inst_(instance),
        // Random reassignment could break the closest-station rule.
        p_(instance.enforce_proximity() ? 0.0 : p),
        weight_(weight) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "assignment randomness must lie in [0, 1]");
    }
  }

  std::vector<Assignment> assign(const std::vector<int>& active, Rng& rng) const {
    return demand_assignment(inst_, active, p_, rng);
  }

  Candidate finish(std::vector<int> active, std::vector<Assignment> assignments) const {
    Candidate c;
    std::sort(active.begin(), active.end());
    relieve_overloads(active, assignments);
    c.active = std::move(active);
    c.solution = solve_assignment(inst_, std::move(assignments), weight_);
    if (c.solution) c.cost = c.solution->cost.total;
    return c;
  }

  Candidate build(std::vector<int> active, Rng& rng) const {
    auto a = assign(active, rng);
    return finish(std::move(active), std::move(a));
  }

 private:
  // Moves the largest demands out of (station, type) queues that exceed
  // capacity into the nearest active option with room. Under the proximity
  // rule only the charger type may change.
  void relieve_overloads(const std::vector<int>& active, std::vector<Assignment>& assignments) const {
    const int n_types = inst_.num_charger_types();
    std::vector<std::vector<double>> load(inst_.num_stations(), std::vector<double>(n_types, 0.0));
    for (const auto& a : assignments) load[a.station][a.charger] += inst_.demand(a.demand).rate;
    auto room = [&](int j, int k) {
      return inst_.charger(k).service_rate * inst_.max_chargers(j, k) * (1.0 - inst_.epsilon());
    };
    std::vector<char> on(inst_.num_stations(), 0);
    for (int j : active) on[j] = 1;

    std::vector<int> order(assignments.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return inst_.demand(assignments[x].demand).rate > inst_.demand(assignments[y].demand).rate;
    });
    for (int idx : order) {
      auto& a = assignments[idx];
      if (load[a.station][a.charger] <= room(a.station, a.charger)) continue;
      const double rate = inst_.demand(a.demand).rate;
      int best_j = -1, best_k = -1;
      for (int j : inst_.demand(a.demand).reachable_stations) {
        if (!on[j] || (inst_.enforce_proximity() && j != a.station)) continue;
        for (int k = 0; k < n_types; ++k) {
          if (load[j][k] + rate > room(j, k)) continue;
          if (best_j < 0 || inst_.travel_time(a.demand, j) < inst_.travel_time(a.demand, best_j)) {
            best_j = j;
            best_k = k;
          }
        }
      }
      if (best_j < 0) continue;
      load[a.station][a.charger] -= rate;
      load[best_j][best_k] += rate;
      a.station = best_j;
      a.charger = best_k;
    }
  }

  const Instance& inst_;
  double p_;
  IncrementWeight weight_;
};

std::vector<int> to_set(const std::vector<char>& on) {
  std::vector<int> out;
  for (std::size_t j = 0; j < on.size(); ++j) {
    if (on[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

SolverReport finish_report(const char* method, const Candidate& best, long iterations,
                           bool timed_out, double time_to_best, Clock::time_point start) {
  if (!best.solution) {
    throw Error(ErrorCode::Infeasible, std::string(method) + ": no feasible solution found");
  }
  SolverReport r;
  r.method = method;
  r.best = *best.solution;
  r.upper_bound = best.cost;
  r.terminated_by = timed_out ? Termination::Time : Termination::Iterations;
  r.iterations = iterations;
  r.run_costs = {best.cost};
  r.time_to_best_s = time_to_best;
  r.elapsed_s = seconds_since(start);
  return r;
}

}  // namespace

// Stations the searches toggle: the admissible ones, or every station with
// reachable demand when the admissible ones alone cannot cover.
namespace {
std::vector<int> search_universe(const Instance& instance) {
  auto universe = admissible_stations(instance);
  if (covers_all(instance, universe)) return universe;
  universe.clear();
  for (int j = 0; j < instance.num_stations(); ++j) {
    if (!instance.station(j).served_demands.empty()) universe.push_back(j);
  }
  return universe;
}

// Screened covers, or the whole universe when no screened cover exists.
std::vector<std::vector<int>> starting_covers(const Instance& instance, int n) {
  try {
    return cover_sets(instance, n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
  }
  return {search_universe(instance)};
}
}  // namespace

SolverReport simulated_annealing(const Instance& instance, const SAParams& params) {
  if (params.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "L must be >= 1");
  if (!(params.cooling_factor > 0.0 && params.cooling_factor <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "cooling factor must lie in (0, 1]");
  }
  if (params.initial_temperature && !(*params.initial_temperature > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial temperature must be > 0");
  }
  const auto start = Clock::now();
  Rng rng(params.seed);
  const Builder builder(instance, params.assignment_randomness, params.increment_weight);
  const auto universe = search_universe(instance);

  std::vector<int> start_set;
  try {
    start_set = min_stations(instance);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
    start_set = universe;
  }
  Candidate current = builder.build(start_set, rng);
  Candidate best = current;
  double time_to_best = seconds_since(start);

  double t0 = params.initial_temperature.value_or(0.1 * current.cost);
  if (!std::isfinite(t0) || !(t0 > 0.0)) t0 = 1.0;
  const double step = params.cooling_factor * t0 / static_cast<double>(params.max_iterations);
  double temperature = t0;

  std::uniform_int_distribution<std::size_t> pick(0, universe.empty() ? 0 : universe.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<char> on(instance.num_stations(), 0);

  long clamp_events = 0;
  long iter = 0;
  bool timed_out = false;
  for (iter = 0; iter < params.max_iterations && !universe.empty(); ++iter) {
    if (out_of_time(params.time_limit_s, start)) {
      timed_out = true;
      break;
    }
    std::fill(on.begin(), on.end(), 0);
    for (int j : current.active) on[j] = 1;
    // Toggle one station, then keep toggling random stations until every
    // demand is covered again.
    do {
      const int j = universe[pick(rng)];
      on[j] = !on[j];
    } while (!covers_all(instance, to_set(on)));

    Candidate next = builder.build(to_set(on), rng);
    bool accept = next.cost < current.cost;
    if (!accept && std::isfinite(next.cost)) {
      const double m = std::isfinite(current.cost)
                           ? std::exp((current.cost - next.cost) / temperature)
                           : 1.0;
      accept = unit(rng) < m;
    }
    if (accept) {
      current = std::move(next);
      if (current.cost < best.cost) {
        best = current;
        time_to_best = seconds_since(start);
      }
    }

    temperature *= 1.0 - step;
    if (!(temperature >= params.temperature_floor)) {
      temperature = params.temperature_floor;
      ++clamp_events;
    }
    if (params.observer && best.solution) params.observer(iter + 1, temperature, *best.solution);
  }

  auto report = finish_report("sa", best, iter, timed_out, time_to_best, start);
  report.clamp_events = clamp_events;
  return report;
}

SolverReport genetic_algorithm(const Instance& instance, const GAParams& params) {
  if (params.population_size < 2) throw Error(ErrorCode::InvalidArgument, "N must be >= 2");
  if (!(params.tournament_fraction > 0.0 && params.tournament_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tournament fraction must lie in (0, 1]");
  }
  if (params.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "L must be >= 1");
  if (!(params.mutation_rate >= 0.0 && params.mutation_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mutation rate must lie in [0, 1]");
  }
  const auto start = Clock::now();
  Rng rng(params.seed);
  const Builder builder(instance, params.assignment_randomness, params.increment_weight);
  const auto universe = search_universe(instance);
  const int n = params.population_size;
  const int n_stations = instance.num_stations();

  // Pad to N by cycling the covers when fewer distinct ones exist.
  const auto covers = starting_covers(instance, n);
  std::vector<Candidate> population;
  population.reserve(n);
  for (int c = 0; c < n; ++c) {
    population.push_back(builder.build(covers[c % covers.size()], rng));
  }

  auto argmin = [&](const std::vector<int>& idx, int skip) {
    int out = -1;
    for (int c : idx) {
      if (c == skip) continue;
      if (out < 0 || population[c].cost < population[out].cost) out = c;
    }
    return out;
  };

  Candidate best = population.front();
  for (const auto& c : population) {
    if (c.cost < best.cost) best = c;
  }
  double time_to_best = seconds_since(start);

  const int tournament =
      std::clamp(static_cast<int>(std::ceil(params.tournament_fraction * n)), 2, n);
  std::vector<int> indices(n);
  std::uniform_int_distribution<std::size_t> pick(0, universe.empty() ? 0 : universe.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  long iter = 0;
  bool timed_out = false;
  for (iter = 0; iter < params.max_iterations && !universe.empty(); ++iter) {
    if (out_of_time(params.time_limit_s, start)) {
      timed_out = true;
      break;
    }
    // Selection: a random subset, its two fittest members become parents.
    for (int c = 0; c < n; ++c) indices[c] = c;
    for (int t = 0; t < tournament; ++t) {
      std::uniform_int_distribution<int> d(t, n - 1);
      std::swap(indices[t], indices[d(rng)]);
    }
    const std::vector<int> chosen(indices.begin(), indices.begin() + tournament);
    const int p1 = argmin(chosen, -1);
    const int p2 = argmin(chosen, p1);

    std::vector<char> y1(n_stations, 0), y2(n_stations, 0), child(n_stations, 0);
    for (int j : population[p1].active) y1[j] = 1;
    for (int j : population[p2].active) y2[j] = 1;
    // 1-based station position j <= |J| / 2 comes from parent 1.
    auto first_half = [&](int j) { return 2 * (j + 1) <= n_stations; };
    for (int j = 0; j < n_stations; ++j) child[j] = first_half(j) ? y1[j] : y2[j];

    // Flip one station, then repair by activating random stations until covered.
    if (unit(rng) < params.mutation_rate) {
      const int j = universe[pick(rng)];
      child[j] = !child[j];
    }
    while (!covers_all(instance, to_set(child))) child[universe[pick(rng)]] = 1;

    auto active = to_set(child);
    auto assignments = builder.assign(active, rng);
    for (auto& a : assignments) {
      // With probability P the random type draw stands, so types keep mutating.
      if (unit(rng) < params.assignment_randomness) continue;
      const bool from_first = first_half(a.station);
      const auto& parent = population[from_first ? p1 : p2];
      const auto& y = from_first ? y1 : y2;
      if (child[a.station] != y[a.station] || !parent.solution) continue;
      const auto& pa = parent.solution->assignments[a.demand];
      if (pa.station == a.station) a.charger = pa.charger;
    }
    Candidate offspring = builder.finish(std::move(active), std::move(assignments));

    int worst = 0;
    for (int c = 1; c < n; ++c) {
      if (population[c].cost > population[worst].cost) worst = c;
    }
    if (offspring.cost < best.cost) {
      best = offspring;
      time_to_best = seconds_since(start);
      population[worst] = std::move(offspring);
    } else if (offspring.cost > population[worst].cost) {
      const double m = std::isfinite(offspring.cost) ? population[worst].cost / offspring.cost : 0.0;
      if (unit(rng) < m) population[worst] = std::move(offspring);
    } else {
      population[worst] = std::move(offspring);
    }
    if (params.observer && best.solution) params.observer(iter + 1, 0.0, *best.solution);
  }

  if (params.final_population) {
    std::vector<std::vector<int>> sets;
    for (const auto& c : population) sets.push_back(c.active);
    params.final_population(sets);
  }
  return finish_report("ga", best, iter, timed_out, time_to_best, start);
}

Method parse_method(const std::string& name) {
  if (name == "brute") return Method::Brute;
  if (name == "bnb") return Method::BranchAndBound;
  if (name == "sa") return Method::Annealing;
  if (name == "ga") return Method::Genetic;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Brute: return "brute";
    case Method::BranchAndBound: return "bnb";
    case Method::Annealing: return "sa";
    case Method::Genetic: return "ga";
  }
  return "unknown";
}

SolverReport multi_run(const Instance& instance, Method method, int n_runs,
                       std::optional<double> time_limit_s, std::uint64_t base_seed,
                       const SAParams& sa, const GAParams& ga) {
  if (n_runs < 1) throw Error(ErrorCode::InvalidArgument, "n_runs must be >= 1");
  if (method != Method::Annealing && method != Method::Genetic) {
    throw Error(ErrorCode::InvalidArgument, "multi_run supports sa and ga only");
  }
  const auto start = Clock::now();
  std::vector<std::future<SolverReport>> runs;
  for (int r = 0; r < n_runs; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    runs.push_back(std::async(std::launch::async, [&, seed] {
      if (method == Method::Annealing) {
        SAParams p = sa;
        p.seed = seed;
        p.observer = nullptr;
        if (time_limit_s) p.time_limit_s = time_limit_s;
        return simulated_annealing(instance, p);
      }
      GAParams p = ga;
      p.seed = seed;
      p.observer = nullptr;
      p.final_population = nullptr;
      if (time_limit_s) p.time_limit_s = time_limit_s;
      return genetic_algorithm(instance, p);
    }));
  }
  std::vector<SolverReport> reports;
  for (auto& f : runs) reports.push_back(f.get());

  std::size_t best = 0;
  std::vector<double> costs;
  std::set<long long> distinct;
  long iterations = 0;
  for (std::size_t r = 0; r < reports.size(); ++r) {
    costs.push_back(reports[r].upper_bound);
    distinct.insert(std::llround(reports[r].upper_bound * 1e6));
    iterations += reports[r].iterations;
    if (reports[r].upper_bound < reports[best].upper_bound) best = r;
  }
  SolverReport out = std::move(reports[best]);
  out.run_costs = std::move(costs);
  out.distinct_solutions = static_cast<int>(distinct.size());
  out.iterations = iterations;
  out.elapsed_s = seconds_since(start);
  return out;
}

}  // namespace placebeb
