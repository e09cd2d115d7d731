#pragma once

// Simulated annealing and a genetic algorithm over station activation sets;
// assignments come from demand_assignment and sizes from best_chargers.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "placebeb/construction.hpp"
#include "placebeb/model.hpp"
#include "placebeb/report.hpp"

namespace placebeb {

// Called once per iteration with the temperature in effect after cooling
// (0 for the genetic algorithm) and the incumbent.
using IterationObserver =
    std::function<void(long iteration, double temperature, const Solution& incumbent)>;

struct SAParams {
  // Defaults to a tenth of the initial solution's cost.
  std::optional<double> initial_temperature;
  long max_iterations = 5000;
  double cooling_factor = 0.9;
  double assignment_randomness = 0.1;
  std::uint64_t seed = 0;
  std::optional<double> time_limit_s;
  double temperature_floor = 1e-12;
  IncrementWeight increment_weight = IncrementWeight::Wait;
  IterationObserver observer;
};

struct GAParams {
  int population_size = 30;
  double tournament_fraction = 0.3;
  double assignment_randomness = 0.1;
  // Chance of flipping one station before repair.
  double mutation_rate = 0.2;
  long max_iterations = 5000;
  std::uint64_t seed = 0;
  std::optional<double> time_limit_s;
  IncrementWeight increment_weight = IncrementWeight::Wait;
  IterationObserver observer;
  // Receives the final population's activation sets.
  std::function<void(const std::vector<std::vector<int>>&)> final_population;
};

SolverReport simulated_annealing(const Instance& instance, const SAParams& params);
SolverReport genetic_algorithm(const Instance& instance, const GAParams& params);

enum class Method { Brute, BranchAndBound, Annealing, Genetic };

Method parse_method(const std::string& name);
const char* to_string(Method m) noexcept;

// n independent runs of SA or GA with seeds base_seed + r, executed
// concurrently. Returns the cheapest run (ties: lowest r) with every run's
// cost and the count of distinct costs at 1e-6 resolution. time_limit_s,
// when set, overrides the per-run limit in the parameters.
SolverReport multi_run(const Instance& instance, Method method, int n_runs,
                       std::optional<double> time_limit_s, std::uint64_t base_seed,
                       const SAParams& sa = {}, const GAParams& ga = {});

}  // namespace placebeb
