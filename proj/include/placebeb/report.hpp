#pragma once

#include <optional>
#include <string>
#include <vector>

#include "placebeb/model.hpp"

namespace placebeb {

enum class Termination { Optimality, Time, Gap, Iterations };

const char* to_string(Termination t) noexcept;

// A tangent cut that was generated for (station, type, servers) at a given
// utilization anchor.
struct CutRecord {
  int station = 0;
  int charger = 0;
  int servers = 0;
  double anchor_rho = 0.0;

  auto operator<=>(const CutRecord&) const = default;
};

struct SolverReport {
  std::string method;
  Solution best;
  // Exact methods only; metaheuristics leave these empty.
  std::optional<double> lower_bound;
  std::optional<double> gap;
  double upper_bound = 0.0;
  Termination terminated_by = Termination::Optimality;

  long nodes_explored = 0;
  long cuts_added = 0;
  std::vector<CutRecord> cuts;
  double big_m = 0.0;

  long iterations = 0;
  long clamp_events = 0;
  // multi_run: objective of every run in seed order and the number of distinct
  // values after rounding to 1e-6.
  std::vector<double> run_costs;
  int distinct_solutions = 1;

  // Wall-clock figures; excluded from reproducibility comparisons.
  double time_to_best_s = 0.0;
  double elapsed_s = 0.0;
};

}  // namespace placebeb
