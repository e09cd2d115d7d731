#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "placebeb/error.hpp"
#include "placebeb/exact.hpp"
#include "placebeb/queueing.hpp"
#include "placebeb/synthetic.hpp"

using namespace placebeb;
using doctest::Approx;
using testing::InstanceBuilder;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

// Cheapest completion of a partial assignment by enumeration; +inf if none.
double best_completion(const Instance& inst, std::vector<int> station_of, std::vector<int> type_of) {
  int i = 0;
  while (i < inst.num_demands() && station_of[i] >= 0) ++i;
  if (i == inst.num_demands()) {
    std::vector<Assignment> a;
    for (int d = 0; d < inst.num_demands(); ++d) a.push_back({d, station_of[d], type_of[d]});
    const auto sol = solve_assignment(inst, a);
    return sol ? sol->cost.total : std::numeric_limits<double>::infinity();
  }
  double best = std::numeric_limits<double>::infinity();
  for (int j : inst.demand(i).reachable_stations) {
    for (int k = 0; k < inst.num_charger_types(); ++k) {
      station_of[i] = j;
      type_of[i] = k;
      best = std::min(best, best_completion(inst, station_of, type_of));
    }
  }
  return best;
}

synthetic::Spec small_spec(std::uint64_t seed) {
  synthetic::Spec spec;
  spec.demands = 1 + static_cast<int>(seed % 4);
  spec.stations = 1 + static_cast<int>((seed / 4) % 3);
  spec.charger_types = 2;
  return spec;
}

}  // namespace

TEST_CASE("brute force on the single-demand example") {
  const auto r = brute_force(testing::one_by_one());
  CHECK(r.best.cost.total == Approx(8.0).epsilon(1e-12));
  CHECK(r.best.chargers[0][0] == 1);
  CHECK(*r.gap == 0.0);
  CHECK(r.terminated_by == Termination::Optimality);
}

TEST_CASE("a dominated station stays closed") {
  auto b = InstanceBuilder().costs(1, 1).type(1.0, 0.5).station(1.0).station(2.0);
  b.demand(0.2, {{0, 1.0}, {1, 2.0}}).demand(0.3, {{0, 0.5}, {1, 3.0}});
  const auto inst = b.build();
  for (const auto& r : {brute_force(inst), branch_and_bound(inst)}) {
    CHECK(r.best.active == std::vector<int>{0});
  }
}

TEST_CASE("branch and bound matches brute force") {
  for (std::uint64_t seed = 0; seed < 48; ++seed) {
    auto spec = small_spec(seed);
    spec.charger_types = 1 + static_cast<int>(seed % 3);
    spec.enforce_proximity = seed % 2 == 1;
    const auto inst = synthetic::random_instance(spec, seed);
    const auto brute = brute_force(inst);
    for (auto mode : {BoundMode::Cuts, BoundMode::Exact}) {
      SolverConfig c;
      c.bound_mode = mode;
      const auto bnb = branch_and_bound(inst, c);
      CHECK(std::abs(bnb.best.cost.total - brute.best.cost.total) <= 1e-6);
      CHECK(*bnb.gap == 0.0);
      CHECK(bnb.terminated_by == Termination::Optimality);
      CHECK(check_feasibility(inst, bnb.best).empty());
    }
  }
}

TEST_CASE("relaxed gap threshold") {
  synthetic::Spec spec;
  spec.demands = 7;
  spec.stations = 4;
  const auto inst = synthetic::random_instance(spec, 5);
  const double opt = branch_and_bound(inst).best.cost.total;
  SolverConfig c;
  c.gap_threshold = 0.5;
  const auto r = branch_and_bound(inst, c);
  CHECK(*r.gap <= 0.5);
  CHECK(r.upper_bound >= opt - 1e-9);
  CHECK(*r.lower_bound <= opt + 1e-9);
  CHECK(*r.gap == Approx(1.0 - *r.lower_bound / r.upper_bound).epsilon(1e-12));
}

TEST_CASE("time limit returns the incumbent with an honest gap") {
  synthetic::Spec spec;
  spec.demands = 40;
  spec.stations = 15;
  spec.profile = synthetic::Profile::Transit;
  spec.max_travel_minutes = 25.0;
  const auto inst = synthetic::random_instance(spec, 1);
  SolverConfig c;
  c.time_limit_s = 0.3;
  const auto r = branch_and_bound(inst, c);
  CHECK(r.terminated_by == Termination::Time);
  CHECK(*r.lower_bound <= r.upper_bound);
  CHECK(*r.gap > 0.0);
  CHECK(check_feasibility(inst, r.best).empty());
  CHECK(r.elapsed_s < 5.0);
}

TEST_CASE("make_cut examples") {
  const auto cut = make_cut(1.0, 1, 0.5);
  CHECK(cut(0.75) == Approx(3.0).epsilon(1e-6));
  CHECK(cut(0.75) <= queueing::expected_wait({0.75, 1.0, 1}));
  CHECK(queueing::expected_wait({0.75, 1.0, 1}) == Approx(4.0));
  const auto c3 = make_cut(0.3, 3, 0.6);
  const double at = 0.6 * 0.3 * 3;
  CHECK(c3(at) == Approx(queueing::expected_wait({at, 0.3, 3})).epsilon(1e-6));
  CHECK(code_of([] { make_cut(1.0, 0, 0.5); }) == ErrorCode::UndefinedCut);
  CHECK(code_of([] { make_cut(1.0, 2, 1.0); }) == ErrorCode::UnstableQueue);
}

TEST_CASE("cuts underestimate the wait") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const int s = 1 + static_cast<int>(rng() % 20);
    const double mu = 0.01 + u(rng);
    const double anchor = 0.001 + 0.998 * u(rng);
    const double load = (0.001 + 0.998 * u(rng)) * mu * s;
    const auto cut = make_cut(mu, s, anchor);
    CHECK(cut(load) <= queueing::expected_wait({load, mu, s}) + 1e-6);
    CHECK(cut.slope >= 0.0);
  }
}

TEST_CASE("compute_gap") {
  CHECK(compute_gap(8.0, 8.0) == 0.0);
  CHECK(compute_gap(50.0, 100.0) == 0.5);
  CHECK(compute_gap(8.0, 8.5333) == Approx(0.0625).epsilon(1e-3));
  CHECK(code_of([] { compute_gap(2.0, 1.0); }) == ErrorCode::InvalidBounds);
  CHECK(code_of([] { compute_gap(0.0, 1.0); }) == ErrorCode::InvalidBounds);
}

TEST_CASE("node bounds never exceed any completion") {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = synthetic::random_instance(small_spec(seed), seed);
    const auto solved = branch_and_bound(inst);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> station_of(inst.num_demands(), -1), type_of(inst.num_demands(), -1);
      std::vector<Assignment> partial;
      for (int i = 0; i < inst.num_demands(); ++i) {
        if (rng() % 2) continue;
        const auto& reach = inst.demand(i).reachable_stations;
        station_of[i] = reach[rng() % reach.size()];
        type_of[i] = static_cast<int>(rng() % inst.num_charger_types());
        partial.push_back({i, station_of[i], type_of[i]});
      }
      const double truth = best_completion(inst, station_of, type_of);
      for (auto mode : {BoundMode::Cuts, BoundMode::Exact}) {
        CHECK(node_lower_bound(inst, partial, {}, mode) <= truth + 1e-9);
        CHECK(node_lower_bound(inst, partial, solved.cuts, mode) <= truth + 1e-9);
      }
    }
  }
}

TEST_CASE("retained cuts keep the optimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = synthetic::random_instance(small_spec(seed + 100), seed);
    const auto first = branch_and_bound(inst);
    SolverConfig c;
    c.initial_cuts = first.cuts;
    const auto again = branch_and_bound(inst, c);
    CHECK(again.best.cost.total == Approx(first.best.cost.total).epsilon(1e-12));
    CHECK(*again.gap == 0.0);
  }
}

TEST_CASE("brute force limits and infeasibility") {
  synthetic::Spec spec;
  spec.demands = 8;
  spec.stations = 4;
  const auto big = synthetic::random_instance(spec, 1);
  SolverConfig c;
  c.brute_force_leaf_cap = 1000;
  CHECK(code_of([&] { brute_force(big, c); }) == ErrorCode::TooLarge);

  auto b = InstanceBuilder().costs(1, 1).type(0.1, 1.0).station(1.0, 2);
  b.demand(0.5, {{0, 1}});
  const auto hopeless = b.build();
  CHECK(code_of([&] { brute_force(hopeless); }) == ErrorCode::Infeasible);
  CHECK(code_of([&] { branch_and_bound(hopeless); }) == ErrorCode::Infeasible);
}

TEST_CASE("charger cap and big-M") {
  const auto inst = synthetic::random_instance(small_spec(11), 11);
  const auto capped = with_charger_cap(inst, 2);
  for (int j = 0; j < capped.num_stations(); ++j) {
    for (int k = 0; k < capped.num_charger_types(); ++k) CHECK(capped.max_chargers(j, k) <= 2);
  }
  const auto r = brute_force(inst);
  const double m = default_big_m(inst);
  for (double q : r.best.cost.per_assignment) CHECK(q < m);
  CHECK(r.big_m == m);
}

TEST_CASE("proximity is enforced when configured") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = synthetic::random_instance(small_spec(seed + 3), seed);
    SolverConfig c;
    c.enforce_proximity = true;
    const auto on = branch_and_bound(inst, c);
    const auto off = branch_and_bound(inst);
    CHECK(check_feasibility(inst, on.best, true).empty());
    CHECK(off.best.cost.total <= on.best.cost.total + 1e-9);
  }
}
