#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "placebeb/error.hpp"
#include "placebeb/construction.hpp"
#include "placebeb/exact.hpp"
#include "placebeb/metaheuristics.hpp"
#include "placebeb/synthetic.hpp"

using namespace placebeb;
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

Instance medium(std::uint64_t seed) {
  synthetic::Spec spec;
  spec.demands = 8;
  spec.stations = 5;
  return synthetic::random_instance(spec, seed);
}

bool same_solution(const Solution& a, const Solution& b) {
  return a.active == b.active && a.assignments == b.assignments && a.chargers == b.chargers &&
         a.cost.total == b.cost.total;
}

}  // namespace

TEST_CASE("annealing finds a unique single-station optimum") {
  auto b = InstanceBuilder().costs(1, 1).type(1.0, 0.2).station(0.5).station(6.0).station(6.0);
  b.demand(0.2, {{0, 1.0}, {1, 1.0}}).demand(0.1, {{0, 1.0}, {2, 1.0}}).demand(0.1, {{0, 1.5}, {1, 0.5}});
  const auto inst = b.build();
  const auto opt = brute_force(inst);
  SAParams p;
  p.max_iterations = 300;
  const auto sa = simulated_annealing(inst, p);
  CHECK(sa.best.active == std::vector<int>{0});
  CHECK(sa.best.cost.total == doctest::Approx(opt.best.cost.total).epsilon(1e-12));
  GAParams g;
  g.max_iterations = 300;
  CHECK(genetic_algorithm(inst, g).best.active == std::vector<int>{0});
}

TEST_CASE("fixed seeds reproduce trajectories") {
  const auto inst = medium(4);
  SAParams p;
  p.max_iterations = 400;
  p.seed = 12;
  std::vector<double> t1, t2;
  p.observer = [&](long, double temp, const Solution& s) { t1.push_back(temp + s.cost.total); };
  const auto a = simulated_annealing(inst, p);
  p.observer = [&](long, double temp, const Solution& s) { t2.push_back(temp + s.cost.total); };
  const auto b = simulated_annealing(inst, p);
  CHECK(t1 == t2);
  CHECK(same_solution(a.best, b.best));

  GAParams g;
  g.max_iterations = 400;
  g.seed = 12;
  std::vector<std::vector<int>> pop1, pop2;
  g.final_population = [&](const std::vector<std::vector<int>>& pop) { pop1 = pop; };
  const auto x = genetic_algorithm(inst, g);
  g.final_population = [&](const std::vector<std::vector<int>>& pop) { pop2 = pop; };
  const auto y = genetic_algorithm(inst, g);
  CHECK(pop1 == pop2);
  CHECK(same_solution(x.best, y.best));
}

TEST_CASE("annealing incumbents improve monotonically and stay feasible") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = medium(seed);
    SAParams p;
    p.max_iterations = 300;
    p.seed = seed;
    double last = std::numeric_limits<double>::infinity();
    bool monotone = true, feasible = true, floor_ok = true;
    p.observer = [&](long, double temp, const Solution& s) {
      monotone &= s.cost.total <= last;
      last = s.cost.total;
      feasible &= check_feasibility(inst, s).empty();
      floor_ok &= temp >= p.temperature_floor;
    };
    simulated_annealing(inst, p);
    CHECK(monotone);
    CHECK(feasible);
    CHECK(floor_ok);
  }
}

TEST_CASE("cooling clamps at the temperature floor") {
  const auto inst = medium(1);
  SAParams p;
  p.max_iterations = 50;
  p.cooling_factor = 1.0;
  p.initial_temperature = 1e6;
  double lowest = std::numeric_limits<double>::infinity();
  p.observer = [&](long, double temp, const Solution&) { lowest = std::min(lowest, temp); };
  const auto r = simulated_annealing(inst, p);
  CHECK(lowest >= p.temperature_floor);
  CHECK(r.clamp_events >= 1);
  CHECK(r.iterations == 50);
}

TEST_CASE("genetic population stays full and covering") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = medium(seed);
    GAParams g;
    g.population_size = 12;
    g.max_iterations = 200;
    g.seed = seed;
    std::vector<std::vector<int>> pop;
    g.final_population = [&](const std::vector<std::vector<int>>& p) { pop = p; };
    bool feasible = true;
    g.observer = [&](long, double, const Solution& s) { feasible &= check_feasibility(inst, s).empty(); };
    genetic_algorithm(inst, g);
    CHECK(pop.size() == 12);
    for (const auto& s : pop) CHECK(covers_all(inst, s));
    CHECK(feasible);
  }
}

TEST_CASE("a single possible cover leaves mutation as the only move") {
  auto b = InstanceBuilder().costs(1, 1).type(1.0, 0.2).station(1.0);
  b.demand(0.2, {{0, 1.0}}).demand(0.1, {{0, 2.0}});
  const auto inst = b.build();
  GAParams g;
  g.population_size = 4;
  g.max_iterations = 20;
  std::vector<std::vector<int>> pop;
  g.final_population = [&](const std::vector<std::vector<int>>& p) { pop = p; };
  const auto r = genetic_algorithm(inst, g);
  for (const auto& s : pop) CHECK(s == std::vector<int>{0});
  CHECK(r.best.cost.total == doctest::Approx(brute_force(inst).best.cost.total).epsilon(1e-12));
}

TEST_CASE("multi_run contracts") {
  const auto inst = medium(3);
  SAParams sa;
  sa.max_iterations = 200;
  sa.seed = 5;
  const auto single = simulated_annealing(inst, sa);
  const auto one = multi_run(inst, Method::Annealing, 1, std::nullopt, 5, sa);
  CHECK(same_solution(single.best, one.best));
  CHECK(one.distinct_solutions == 1);

  GAParams ga;
  ga.max_iterations = 100;
  const auto ten = multi_run(inst, Method::Genetic, 10, std::nullopt, 100, sa, ga);
  REQUIRE(ten.run_costs.size() == 10);
  for (double c : ten.run_costs) CHECK(ten.best.cost.total <= c);
  CHECK(ten.distinct_solutions >= 1);
  CHECK(ten.distinct_solutions <= 10);

  // A single feasible station: every run ends at the same cost.
  auto b = InstanceBuilder().costs(1, 1).type(1.0, 0.2).station(1.0);
  b.demand(0.2, {{0, 1.0}});
  const auto easy = multi_run(b.build(), Method::Annealing, 5, std::nullopt, 0, sa);
  CHECK(easy.distinct_solutions == 1);
}

TEST_CASE("method names and parameter checks") {
  CHECK(parse_method("brute") == Method::Brute);
  CHECK(parse_method("bnb") == Method::BranchAndBound);
  CHECK(parse_method("sa") == Method::Annealing);
  CHECK(parse_method("ga") == Method::Genetic);
  CHECK(std::string(to_string(Method::Genetic)) == "ga");
  CHECK(code_of([] { parse_method("lp"); }) == ErrorCode::InvalidArgument);

  const auto inst = medium(0);
  SAParams bad;
  bad.cooling_factor = 0.0;
  CHECK(code_of([&] { simulated_annealing(inst, bad); }) == ErrorCode::InvalidArgument);
  GAParams small;
  small.population_size = 1;
  CHECK(code_of([&] { genetic_algorithm(inst, small); }) == ErrorCode::InvalidArgument);

  auto b = InstanceBuilder().costs(1, 1).type(0.1, 1.0).station(1.0, 2);
  b.demand(0.5, {{0, 1}});
  CHECK(code_of([&] { simulated_annealing(b.build(), SAParams{}); }) == ErrorCode::Infeasible);
}

TEST_CASE("dense demand without a screened cover still solves") {
  // Every station reaches every demand but none can absorb all of it.
  synthetic::Spec spec;
  spec.demands = 40;
  spec.stations = 15;
  spec.profile = synthetic::Profile::Transit;
  spec.max_travel_minutes = 25.0;
  const auto inst = synthetic::random_instance(spec, 1);
  CHECK(code_of([&] { min_stations(inst); }) == ErrorCode::Infeasible);
  SAParams sa;
  sa.max_iterations = 300;
  GAParams ga;
  ga.max_iterations = 300;
  for (const auto& r : {simulated_annealing(inst, sa), genetic_algorithm(inst, ga)}) {
    CHECK(check_feasibility(inst, r.best).empty());
    for (int j = 0; j < inst.num_stations(); ++j) {
      for (int k = 0; k < inst.num_charger_types(); ++k) CHECK(r.best.chargers[j][k] <= inst.max_chargers(j, k));
    }
  }
}

TEST_CASE("mutation rate bounds") {
  const auto inst = medium(0);
  GAParams g;
  g.mutation_rate = 1.5;
  CHECK(code_of([&] { genetic_algorithm(inst, g); }) == ErrorCode::InvalidArgument);
  g.mutation_rate = 0.0;
  g.max_iterations = 50;
  CHECK(check_feasibility(inst, genetic_algorithm(inst, g).best).empty());
}
