// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "placebeb/cli.hpp"
#include "placebeb/construction.hpp"
#include "placebeb/demand.hpp"
#include "placebeb/error.hpp"
#include "placebeb/exact.hpp"
#include "placebeb/io.hpp"
#include "placebeb/metaheuristics.hpp"
#include "placebeb/queueing.hpp"
#include "placebeb/studies.hpp"
#include "placebeb/synthetic.hpp"

using namespace placebeb;
namespace fs = std::filesystem;

namespace {

const std::string kData = PLACEBEB_TEST_DATA;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Fixture {
  int seed = 0;
  Instance instance;
  double optimum = 0.0;
  double optimum_proximity = 0.0;
};

std::vector<Fixture> load_fixtures() {
  std::vector<Fixture> out;
  const auto doc = io::read_json(kData + "/fixtures.json");
  for (const auto& f : doc.at("fixtures")) {
    out.push_back({f.at("seed").get<int>(), io::instance_from_json(f.at("instance")),
                   f.at("optimum").get<double>(), f.at("optimum_proximity").get<double>()});
  }
  return out;
}

const std::vector<Fixture>& fixtures() {
  static const auto all = load_fixtures();
  if (all.empty()) throw std::runtime_error("no fixtures loaded");
  return all;
}

Instance with_proximity(const Instance& inst, bool on) {
  auto d = inst.data();
  d.options.enforce_proximity = on;
  return Instance(std::move(d));
}

double exact_cost(const Instance& inst) { return brute_force(inst).best.cost.total; }

using Big = boost::multiprecision::cpp_bin_float_50;

double erlang_c_direct(double arrival, double service, int s) {
  const Big a = Big(arrival) / Big(service);
  const Big rho = a / s;
  Big head = 0, term = 1;
  for (int n = 0; n < s; ++n) {
    head += term;
    term = term * a / (n + 1);
  }
  const Big tail = term / (1 - rho);
  return static_cast<double>(tail / (head + tail));
}

Outcome queueing_exactness() {
  double worst_closed = 0.0, worst_direct = 0.0;
  for (int r = 1; r <= 19; ++r) {
    const double rho = 0.05 * r;
    for (double mu : {0.1, 1.0, 3.7}) {
      worst_closed = std::max(worst_closed, std::abs(queueing::erlang_c({rho * mu, mu, 1}) - rho));
      worst_closed = std::max(
          worst_closed, std::abs(queueing::expected_wait({rho * mu, mu, 1}) - 1.0 / (mu - rho * mu)));
      const double p2 = 2 * rho * rho / (1 + rho);
      worst_closed = std::max(worst_closed, std::abs(queueing::erlang_c({2 * rho * mu, mu, 2}) - p2));
      worst_closed = std::max(worst_closed,
                              std::abs(queueing::expected_wait({2 * rho * mu, mu, 2}) -
                                       (p2 / (2 * mu * (1 - rho)) + 1 / mu)));
    }
  }
  for (int s = 1; s <= 20; ++s) {
    for (int r = 1; r <= 9; ++r) {
      const double lambda = 0.1 * r * 0.8 * s;
      worst_direct = std::max(
          worst_direct, std::abs(queueing::erlang_c({lambda, 0.8, s}) - erlang_c_direct(lambda, 0.8, s)));
    }
  }
  std::ostringstream d;
  d << "closed-form error " << worst_closed << ", direct-sum error " << worst_direct;
  return {worst_closed <= 1e-9 && worst_direct <= 1e-12, d.str()};
}

Outcome cut_validity() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int below = 0, tangent = 0;
  double worst = -1e300;
  for (int n = 0; n < 1000; ++n) {
    const int s = 1 + static_cast<int>(rng() % 20);
    const double mu = 0.005 + 2.0 * u(rng);
    const double anchor = 0.001 + 0.998 * u(rng);
    const double load = (0.001 + 0.998 * u(rng)) * mu * s;
    const auto cut = make_cut(mu, s, anchor);
    const double excess = cut(load) - queueing::expected_wait({load, mu, s});
    worst = std::max(worst, excess);
    below += excess <= 1e-6;
    const double at = anchor * mu * s;
    tangent += std::abs(cut(at) - queueing::expected_wait({at, mu, s})) <= 1e-6;
  }
  std::ostringstream d;
  d << below << "/1000 below, " << tangent << "/1000 tangent at anchor, max excess " << worst;
  return {below == 1000 && tangent == 1000, d.str()};
}

Outcome oracle_equivalence() {
  int match = 0, archived = 0;
  for (const auto& f : fixtures()) {
    SolverConfig c;
    c.gap_threshold = 0.0;
    const double bnb = branch_and_bound(f.instance, c).best.cost.total;
    const double brute = exact_cost(f.instance);
    match += std::abs(bnb - brute) <= 1e-6;
    archived += std::abs(brute - f.optimum) <= 1e-6;
  }
  std::ostringstream d;
  d << match << "/" << fixtures().size() << " bnb = brute, " << archived
    << " brute = archived enumeration optimum";
  return {match == static_cast<int>(fixtures().size()) && archived == match, d.str()};
}

Outcome charger_sizing() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lam(0.01, 8.0), mu(0.02, 1.5), ct(0.01, 20.0), cx(0.0005, 10.0);
  int equal = 0, tested = 0;
  while (tested < 500) {
    const double l = lam(rng), m = mu(rng), wait_rate = ct(rng), unit = cx(rng);
    InstanceData d;
    d.charger_types.push_back({0, "k", 100.0, unit, m, 1.0 / m});
    CandidateStation st;
    st.id = "S";
    st.fixed_cost_rate = 1.0;
    st.max_chargers = {50};
    d.stations.push_back(st);
    DemandPoint p;
    p.id = "D";
    p.rate = l;
    p.reachable_stations = {0};
    d.demand_points.push_back(p);
    d.travel_time = {{1.0}};
    d.costs = {1.0, wait_rate};
    const Instance inst(std::move(d));
    const int lo = min_servers(l, m, inst.epsilon());
    if (lo > 50) continue;
    ++tested;
    int best_s = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int s = lo; s <= 50; ++s) {
      const double c = unit * s + wait_rate * l * queueing::expected_wait({l, m, s});
      if (c < best) {
        best = c;
        best_s = s;
      }
    }
    equal += best_chargers(inst, {{0, 0, 0}})[0][0] == best_s;
  }
  std::ostringstream d;
  d << equal << "/500 greedy = exhaustive";
  return {equal == 500, d.str()};
}

Outcome proximity_relaxation() {
  int dominated = 0, strict = 0;
  for (const auto& f : fixtures()) {
    const double off = exact_cost(with_proximity(f.instance, false));
    const double on = exact_cost(with_proximity(f.instance, true));
    dominated += off <= on;
    strict += off < on;
  }
  std::ostringstream d;
  d << dominated << "/" << fixtures().size() << " relaxed <= constrained, " << strict
    << " strictly better";
  return {dominated == static_cast<int>(fixtures().size()) && strict >= 1, d.str()};
}

Outcome metaheuristic_quality() {
  synthetic::Spec small;
  small.demands = 3;
  small.stations = 5;
  int sa_hits = 0, ga_hits = 0;
  double slowest = 0.0;
  for (std::uint64_t n = 0; n < 100; ++n) {
    const auto inst = synthetic::random_instance(small, 1000 + n);
    const double opt = exact_cost(inst);
    SAParams sa;
    sa.seed = n;
    sa.time_limit_s = 30.0;
    GAParams ga;
    ga.seed = n;
    ga.time_limit_s = 30.0;
    const auto a = simulated_annealing(inst, sa);
    const auto g = genetic_algorithm(inst, ga);
    slowest = std::max({slowest, a.elapsed_s, g.elapsed_s});
    sa_hits += a.best.cost.total <= opt + 1e-6 * std::max(1.0, opt);
    ga_hits += g.best.cost.total <= opt + 1e-6 * std::max(1.0, opt);
  }

  synthetic::Spec large;
  large.demands = 20;
  large.stations = 5;
  int ga_wins = 0;
  for (std::uint64_t n = 0; n < 20; ++n) {
    const auto inst = synthetic::random_instance(large, 5000 + n);
    SAParams sa;
    sa.seed = n;
    sa.time_limit_s = 120.0;
    GAParams ga;
    ga.seed = n;
    ga.time_limit_s = 120.0;
    const double a = simulated_annealing(inst, sa).best.cost.total;
    const double g = genetic_algorithm(inst, ga).best.cost.total;
    ga_wins += g <= a;
  }
  std::ostringstream d;
  d << "3x5: SA " << sa_hits << "/100, GA " << ga_hits << "/100 optimal (slowest run " << std::setprecision(3)
    << slowest << " s); 20x5: GA <= SA on " << ga_wins << "/20";
  return {sa_hits >= 90 && ga_hits >= 90 && ga_wins >= 12 && slowest <= 30.0, d.str()};
}

Outcome scenario_dominance() {
  int ok = 0;
  std::string note;
  for (std::uint64_t n = 0; n < 5; ++n) {
    synthetic::Spec spec;
    spec.demands = 4;
    spec.stations = 4;
    spec.agencies = 2;
    spec.max_travel_minutes = 60.0;
    const auto inst = synthetic::random_instance(spec, 70 + n);
    const auto rows = studies::run_scenarios(
        inst, [](const Instance& x) { return brute_force(x); });
    const auto& base = rows[2];
    bool good = base.ok();
    for (const auto& r : rows) {
      if (!r.ok() || !base.ok()) continue;
      good &= base.cost <= r.cost;
    }
    for (int regime = 0; regime < 3; ++regime) {
      const auto& joint = rows[regime];
      const auto& sep = rows[3 + regime];
      if (joint.ok() && sep.ok()) good &= joint.cost <= sep.cost;
      if (!joint.ok() && sep.ok()) good = false;
    }
    ok += good;
  }
  std::ostringstream d;
  d << ok << "/5 instances ordered";
  return {ok == 5, d.str()};
}

Outcome sensitivity_monotonicity() {
  using studies::SweepParameter;
  struct Case {
    SweepParameter p;
    std::vector<double> mult;
    bool increasing;
  };
  const std::vector<Case> cases = {
      {SweepParameter::WaitCost, {1, 2, 4, 6, 8, 10}, true},
      {SweepParameter::StationCost, {1, 1.1, 1.3, 1.5, 2, 3}, true},
      {SweepParameter::ChargerPower, {1, 1.2, 1.4, 1.6, 1.8}, false},
      {SweepParameter::ChargerCost, {1, 0.8, 0.6, 0.4, 0.2}, false},
  };
  int violations = 0, checked = 0;
  for (const auto& f : fixtures()) {
    for (const auto& c : cases) {
      double prev = 0.0;
      for (std::size_t n = 0; n < c.mult.size(); ++n) {
        const double cost = exact_cost(studies::apply_multiplier(f.instance, c.p, c.mult[n]));
        if (n > 0) {
          ++checked;
          violations += c.increasing ? !(cost >= prev) : !(cost <= prev);
        }
        prev = cost;
      }
    }
  }
  std::ostringstream d;
  d << checked - violations << "/" << checked << " consecutive steps monotone";
  return {violations == 0, d.str()};
}

Outcome demand_segmentation() {
  const auto blocks = io::read_blocks_csv(kData + "/single_block.csv");
  const auto events = demand::segment_block(blocks.at(0), 360.0);
  int at_four = 0;
  for (const auto& e : events) at_four += e.stop_id == "F" && e.time == 960.0;
  const bool later = events.size() == 2 && events[1].time > 960.0 && std::abs(events[1].time - 1440.0) <= 15.0;
  std::ostringstream d;
  d << events.size() << " events:";
  for (const auto& e : events) d << " " << e.stop_id << "@" << e.time;
  return {at_four == 1 && events.size() == 2 && events[0].stop_id == "F" && later, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("placebeb_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);
  {
    synthetic::Spec spec;
    spec.demands = 9;
    spec.stations = 5;
    spec.agencies = 2;
    spec.max_travel_minutes = 40.0;
    io::save_instance(synthetic::random_instance(spec, 123), root / "inst.json");
    spec.demands = 6;
    spec.stations = 4;
    io::save_instance(synthetic::random_instance(spec, 321), root / "small.json");
  }
  const std::string inst = (root / "inst.json").string();
  const std::string small = (root / "small.json").string();
  struct Command {
    std::string name;
    std::function<std::vector<std::string>(const fs::path&)> args;
    std::string output;
    bool json;
  };
  const std::vector<Command> commands = {
      {"gen-demand",
       [](const fs::path& d) {
         return std::vector<std::string>{"gen-demand", "--blocks", kData + "/blocks10.csv", "--stations",
                                         kData + "/stations10.csv", "--range", "300", "--max-travel", "30",
                                         "--out", (d / "gen.json").string()};
       },
       "gen.json", false},
      {"cluster",
       [&](const fs::path& d) {
         return std::vector<std::string>{"--seed", "5", "cluster", inst, "--k-demand", "4", "--k-station", "4",
                                         "--out", (d / "cl.json").string()};
       },
       "cl.json", false},
      {"solve brute",
       [&](const fs::path& d) {
         return std::vector<std::string>{"solve", small, "--method", "brute", "--out", (d / "brute.json").string()};
       },
       "brute.json", true},
      {"solve bnb",
       [&](const fs::path& d) {
         return std::vector<std::string>{"solve", inst, "--method", "bnb", "--out", (d / "bnb.json").string()};
       },
       "bnb.json", true},
      {"solve sa x4",
       [&](const fs::path& d) {
         return std::vector<std::string>{"--seed", "11", "solve", inst, "--method", "sa", "--runs", "4", "--out",
                                         (d / "sa.json").string()};
       },
       "sa.json", true},
      {"solve ga",
       [&](const fs::path& d) {
         return std::vector<std::string>{"--seed", "11", "solve", inst, "--method", "ga", "--out",
                                         (d / "ga.json").string()};
       },
       "ga.json", true},
      {"scenarios",
       [&](const fs::path& d) {
         return std::vector<std::string>{"--seed", "2", "scenarios", inst, "--method", "sa", "--out",
                                         (d / "sc.csv").string()};
       },
       "sc.csv", false},
      {"sensitivity",
       [&](const fs::path& d) {
         return std::vector<std::string>{"sensitivity", inst, "--parameter", "charger_power", "--method", "bnb",
                                         "--out", (d / "se.csv").string()};
       },
       "se.csv", false},
  };
  int stable = 0;
  std::string failed;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    bool ran = true;
    for (int rep = 0; rep < 3; ++rep) {
      const fs::path dir = root / ("rep" + std::to_string(rep));
      fs::create_directories(dir);
      std::ostringstream out, err;
      const int code = cli::run(cmd.args(dir), out, err);
      ran &= code == 0;
      const auto text = slurp(dir / cmd.output);
      outputs.push_back(cmd.json ? io::strip_metadata(io::Json::parse(text)).dump() : text);
    }
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2]) {
      ++stable;
    } else {
      failed += " " + cmd.name;
    }
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << stable << "/" << commands.size() << " commands byte-identical over 3 runs";
  if (!failed.empty()) d << " (differs:" << failed << ")";
  return {stable == static_cast<int>(commands.size()), d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "queueing exactness", queueing_exactness},
      {2, "cut validity", cut_validity},
      {3, "oracle equivalence", oracle_equivalence},
      {4, "charger sizing optimality", charger_sizing},
      {5, "proximity relaxation", proximity_relaxation},
      {6, "metaheuristic quality", metaheuristic_quality},
      {7, "scenario dominance", scenario_dominance},
      {8, "sensitivity monotonicity", sensitivity_monotonicity},
      {9, "demand segmentation", demand_segmentation},
      {10, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " [" << c.name << "] "
              << o.detail << " (" << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
