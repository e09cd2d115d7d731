#pragma once

// Exact solution of the location/sizing/assignment model: exhaustive
// enumeration for tiny instances and a best-first branch-and-bound whose wait
// floors are tightened by tangent cuts of the delay curve.

#include <cstdint>
#include <optional>
#include <vector>

#include "placebeb/construction.hpp"
#include "placebeb/model.hpp"
#include "placebeb/report.hpp"

namespace placebeb {

enum class BoundMode {
  Cuts,   // wait floor = max(service time, retained tangent cuts)
  Exact,  // wait floor = exact sizing of the committed load
};

struct SolverConfig {
  double gap_threshold = 0.0;
  std::optional<double> time_limit_s;
  // Reported only; the search never linearizes through it. Defaults to
  // default_big_m(instance).
  std::optional<double> big_m;
  // Global cap on chargers per (station, type), applied on top of the
  // station capacities.
  std::optional<int> max_chargers;
  // Overrides the instance option when set.
  std::optional<bool> enforce_proximity;
  std::uint64_t seed = 0;

  BoundMode bound_mode = BoundMode::Cuts;
  IncrementWeight increment_weight = IncrementWeight::Wait;
  // Beyond this many open nodes the search dives depth-first.
  std::size_t max_open_nodes = 1'000'000;
  std::optional<Solution> warm_start;
  std::vector<CutRecord> initial_cuts;
  double brute_force_leaf_cap = 2e7;
};

// Affine lower bound on the expected wait as a function of the load assigned
// to one (station, type) group with a fixed number of chargers.
struct WaitFloor {
  double intercept = 0.0;  // A / (mu s) + 1 / mu
  double slope = 0.0;      // B / (mu^2 s^2)
  double anchor_rho = 0.0;
  int servers = 0;
  double service_rate = 0.0;

  double operator()(double load) const { return intercept + slope * load; }
};

// Throws UndefinedCut for servers == 0 and UnstableQueue for an anchor
// outside (0, 1).
WaitFloor make_cut(double service_rate, int servers, double anchor_rho);
WaitFloor make_cut(const Instance& instance, int station, int charger, int servers,
                   double anchor_rho);

// 1 - lower / upper. Throws InvalidBounds unless 0 < lower <= upper.
double compute_gap(double lower, double upper);

// 10 * max lambda * (travel rate * max travel + wait rate * max wait at
// rho = 1 - eps with one charger).
double default_big_m(const Instance& instance);

// Copy of the instance with every capacity clipped to `cap`.
Instance with_charger_cap(const Instance& instance, int cap);

// Exhaustive enumeration of assignments; each is sized with best_chargers.
// Throws TooLarge above the leaf cap and Infeasible without a stable leaf.
SolverReport brute_force(const Instance& instance, const SolverConfig& config = {});

SolverReport branch_and_bound(const Instance& instance, const SolverConfig& config = {});

// Lower bound for every completion of a partial assignment, given cuts for
// the floors. Exposed for validity tests.
double node_lower_bound(const Instance& instance, const std::vector<Assignment>& partial,
                        const std::vector<CutRecord>& cuts,
                        BoundMode mode = BoundMode::Cuts);

}  // namespace placebeb
