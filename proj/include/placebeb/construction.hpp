#pragma once

// Constructive building blocks shared by the heuristics and the exact search:
// greedy station cover, cover-set population, randomized demand assignment and
// charger sizing.

#include <optional>
#include <random>
#include <vector>

#include "placebeb/model.hpp"

namespace placebeb {

using Rng = std::mt19937_64;

// Which cost rate weights the wait reduction when deciding whether one more
// charger pays for itself. Wait matches the objective; Travel reproduces the
// alternative weighting some descriptions print.
enum class IncrementWeight { Wait, Travel };

// Stations whose full capacity can absorb all demand they could serve:
// sum_k mu_k * max_chargers(j, k) > sum_{i in I_j} lambda_i. Stations serving
// no demand are excluded.
std::vector<int> admissible_stations(const Instance& instance);

// True if every demand has a reachable station in `active`.
bool covers_all(const Instance& instance, const std::vector<int>& active);

// Greedy cover: repeatedly add the admissible station covering the most
// still-uncovered demands (ties: lower fixed cost, then lower index). Result
// is ascending. Throws Infeasible if coverage cannot be completed.
std::vector<int> min_stations(const Instance& instance);

// Up to `population` covers of size S or S + 1, S being the smallest cover
// size met during a backtracking search over admissible stations in index
// order. Each cover is ascending. Throws Infeasible without a cover.
std::vector<std::vector<int>> cover_sets(const Instance& instance, int population);

// For each demand: with probability p a uniformly random reachable active
// station, otherwise the closest one (ties to the lower index); charger type
// uniform. Throws Uncovered if a demand has no reachable active station.
std::vector<Assignment> demand_assignment(const Instance& instance,
                                          const std::vector<int>& active, double p, Rng& rng);

// Smallest s with mu * s * (1 - eps) >= load (0 for no load).
int min_servers(double load, double service_rate, double epsilon);

// Charger plus weighted wait cost of one (station, type) group.
double group_cost(double load, double service_rate, int servers, double unit_cost,
                  double wait_weight);

// Greedy sizing of one group from the stability minimum upwards while the
// next charger lowers the group cost, up to `cap`. nullopt if the minimum
// exceeds the cap.
std::optional<int> size_group(double load, double service_rate, double epsilon, int cap,
                              double unit_cost, double wait_weight);

// Charger counts [station][type] for an assignment; nullopt when some group
// cannot be stabilised within capacity.
std::optional<std::vector<std::vector<int>>> try_best_chargers(
    const Instance& instance, const std::vector<Assignment>& assignments,
    IncrementWeight weight = IncrementWeight::Wait);

// As above, throwing Infeasible instead of returning nullopt.
std::vector<std::vector<int>> best_chargers(const Instance& instance,
                                            const std::vector<Assignment>& assignments,
                                            IncrementWeight weight = IncrementWeight::Wait);

// best_chargers followed by complete_solution with the active set taken as
// the stations that receive traffic. nullopt when infeasible.
std::optional<Solution> solve_assignment(const Instance& instance,
                                         std::vector<Assignment> assignments,
                                         IncrementWeight weight = IncrementWeight::Wait);

}  // namespace placebeb
