#include "placebeb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "placebeb/demand.hpp"
#include "placebeb/error.hpp"
#include "placebeb/studies.hpp"

namespace placebeb::cli {
namespace {

template <typename T>
void maybe(const io::Json& j, const char* key, T& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

template <typename T>
void maybe(const io::Json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

IncrementWeight parse_weight(const std::string& s) {
  if (s == "wait") return IncrementWeight::Wait;
  if (s == "travel") return IncrementWeight::Travel;
  throw Error(ErrorCode::Parse, "increment_weight must be 'wait' or 'travel'");
}

}  // namespace

void apply_preset(Settings& s, const std::string& name) {
  if (name == "paper-table-sm3") {
    s.baseline = presets::transit_baseline();
  } else if (name == "paper-s54") {
    s.size_scaled_time_limit = true;
  } else {
    throw Error(ErrorCode::Parse, "unknown preset '" + name + "'");
  }
}

void apply_config(Settings& s, const io::Json& c) {
  try {
    if (c.contains("preset")) apply_preset(s, c.at("preset").get<std::string>());
    maybe(c, "seed", s.seed);
    maybe(c, "time_limit", s.time_limit_s);
    maybe(c, "n_runs", s.n_runs);
    if (c.contains("method")) s.study_method = parse_method(c.at("method").get<std::string>());

    if (c.contains("instance")) {
      const auto& i = c.at("instance");
      maybe(i, "max_travel_minutes", s.max_travel_minutes);
      maybe(i, "speed_kmh", s.instance_options.speed_kmh);
      maybe(i, "epsilon", s.instance_options.epsilon);
      maybe(i, "enforce_proximity", s.instance_options.enforce_proximity);
      maybe(i, "max_chargers", s.default_max_chargers);
      maybe(i, "station_capital_usd", s.baseline.station_capital_usd);
      maybe(i, "station_lifetime_years", s.baseline.station_lifetime_years);
      maybe(i, "travel_cost_rate", s.baseline.costs.travel);
      maybe(i, "wait_cost_rate", s.baseline.costs.wait);
      if (i.contains("battery")) {
        const auto& b = i.at("battery");
        maybe(b, "capacity_kwh", s.baseline.battery.capacity_kwh);
        maybe(b, "soc_start_pct", s.baseline.battery.soc_start_pct);
        maybe(b, "soc_end_pct", s.baseline.battery.soc_end_pct);
      }
      if (i.contains("chargers")) {
        s.baseline.chargers.clear();
        for (const auto& k : i.at("chargers")) {
          s.baseline.chargers.push_back({k.at("name").get<std::string>(), k.at("power_kw").get<double>(),
                                         k.at("capital_usd").get<double>(),
                                         k.at("lifetime_years").get<double>()});
        }
      }
    }
    for (const char* key : {"bnb", "brute"}) {
      if (!c.contains(key)) continue;
      const auto& b = c.at(key);
      maybe(b, "gap_threshold", s.exact.gap_threshold);
      maybe(b, "time_limit", s.exact.time_limit_s);
      maybe(b, "big_m", s.exact.big_m);
      maybe(b, "max_chargers", s.exact.max_chargers);
      maybe(b, "enforce_proximity", s.exact.enforce_proximity);
      maybe(b, "max_open_nodes", s.exact.max_open_nodes);
      maybe(b, "leaf_cap", s.exact.brute_force_leaf_cap);
      if (b.contains("bound_mode")) {
        const auto m = b.at("bound_mode").get<std::string>();
        if (m != "cuts" && m != "exact") throw Error(ErrorCode::Parse, "bound_mode must be cuts or exact");
        s.exact.bound_mode = m == "cuts" ? BoundMode::Cuts : BoundMode::Exact;
      }
      if (b.contains("increment_weight")) {
        s.exact.increment_weight = parse_weight(b.at("increment_weight").get<std::string>());
      }
    }
    if (c.contains("sa")) {
      const auto& a = c.at("sa");
      maybe(a, "initial_temperature", s.sa.initial_temperature);
      maybe(a, "max_iterations", s.sa.max_iterations);
      maybe(a, "cooling_factor", s.sa.cooling_factor);
      maybe(a, "assignment_randomness", s.sa.assignment_randomness);
      maybe(a, "seed", s.sa.seed);
      maybe(a, "time_limit", s.sa.time_limit_s);
      maybe(a, "n_runs", s.n_runs);
      if (a.contains("increment_weight")) {
        s.sa.increment_weight = parse_weight(a.at("increment_weight").get<std::string>());
      }
    }
    if (c.contains("ga")) {
      const auto& g = c.at("ga");
      maybe(g, "population_size", s.ga.population_size);
      maybe(g, "tournament_fraction", s.ga.tournament_fraction);
      maybe(g, "assignment_randomness", s.ga.assignment_randomness);
      maybe(g, "mutation_rate", s.ga.mutation_rate);
      maybe(g, "max_iterations", s.ga.max_iterations);
      maybe(g, "seed", s.ga.seed);
      maybe(g, "time_limit", s.ga.time_limit_s);
      maybe(g, "n_runs", s.n_runs);
      if (g.contains("increment_weight")) {
        s.ga.increment_weight = parse_weight(g.at("increment_weight").get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
}

std::optional<double> time_limit_for(const Settings& s, const Instance& instance) {
  if (s.time_limit_s) return s.time_limit_s;
  if (s.size_scaled_time_limit) {
    return presets::size_scaled_time_limit(instance.num_demands() + instance.num_stations());
  }
  return std::nullopt;
}

SolverReport solve(const Instance& instance, Method method, const Settings& settings) {
  const auto limit = time_limit_for(settings, instance);
  switch (method) {
    case Method::Brute: {
      SolverConfig c = settings.exact;
      c.seed = settings.seed;
      return brute_force(instance, c);
    }
    case Method::BranchAndBound: {
      SolverConfig c = settings.exact;
      c.seed = settings.seed;
      if (limit) c.time_limit_s = limit;
      return branch_and_bound(instance, c);
    }
    case Method::Annealing:
    case Method::Genetic: {
      SAParams sa = settings.sa;
      GAParams ga = settings.ga;
      sa.seed = ga.seed = settings.seed;
      if (settings.n_runs > 1) {
        return multi_run(instance, method, settings.n_runs, limit, settings.seed, sa, ga);
      }
      if (limit) sa.time_limit_s = ga.time_limit_s = limit;
      return method == Method::Annealing ? simulated_annealing(instance, sa)
                                         : genetic_algorithm(instance, ga);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::Parse:
        return kParseError;
      case ErrorCode::Infeasible:
      case ErrorCode::InfeasibleDemand:
      case ErrorCode::Uncovered:
      case ErrorCode::UnstableQueue:
        return kInfeasible;
      case ErrorCode::TimeLimit:
        return kTimeout;
      default:
        return kFailure;
    }
  }
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kParseError;
  return kFailure;
}

namespace {

std::string summary_line(const Instance& instance, const SolverReport& r) {
  int chargers = 0;
  for (const auto& row : r.best.chargers) {
    for (int s : row) chargers += s;
  }
  (void)instance;
  std::ostringstream o;
  o << std::setprecision(10) << "method=" << r.method << " cost=" << r.best.cost.total
    << " gap=";
  if (r.gap) {
    o << *r.gap;
  } else {
    o << "n/a";
  }
  o << " stations=" << r.best.active.size() << " chargers=" << chargers
    << " time_to_best=" << r.time_to_best_s << "s terminated_by=" << to_string(r.terminated_by);
  return o.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad multiplier '" + item + "'");
    }
  }
  return out;
}

int cmd_gen_demand(const Settings& s, const std::string& blocks_csv, const std::string& stations_csv,
                   double range, double horizon, std::optional<double> max_travel,
                   const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto blocks = io::read_blocks_csv(blocks_csv);
  const auto types = s.baseline.charger_types();
  auto stations = io::read_stations_csv(stations_csv, types, s.default_max_chargers);

  std::vector<demand::DemandEvent> events;
  for (const auto& b : blocks) {
    auto e = demand::segment_block(b, range);
    events.insert(events.end(), e.begin(), e.end());
  }
  auto points = demand::aggregate_demand(events, horizon);

  std::set<std::string> known;
  for (const auto& st : stations) known.insert(st.id);
  for (const auto& b : blocks) {
    if (known.count(b.garage_id)) continue;
    CandidateStation g;
    g.id = b.garage_id;
    g.location = b.trips.front().origin.location;
    g.is_garage = true;
    g.fixed_cost_rate = s.baseline.station_cost_rate();
    g.max_chargers.assign(types.size(), s.default_max_chargers);
    g.agency = b.agency;
    stations.push_back(std::move(g));
    known.insert(b.garage_id);
  }
  if (points.empty()) err << "warning: no charging demand events; instance has no demand points\n";

  const double cutoff = max_travel.value_or(s.max_travel_minutes);
  auto options = s.instance_options;
  options.max_travel_minutes = cutoff;
  auto inst = demand::make_instance(std::move(points), std::move(stations), types,
                                    s.baseline.costs, options, cutoff);
  auto data = inst.data();
  data.battery = s.baseline.battery;
  const Instance final_instance(std::move(data));
  io::save_instance(final_instance, out_path);
  out << "blocks=" << blocks.size() << " events=" << events.size()
      << " demand_points=" << final_instance.num_demands()
      << " stations=" << final_instance.num_stations() << '\n';
  return kOk;
}

int cmd_cluster(const Settings& s, const std::string& instance_path, std::optional<int> k_demand,
                std::optional<int> k_station, const std::string& out_path, std::ostream& out) {
  const auto inst = io::load_instance(instance_path);
  const auto clustered = demand::cluster_instance(inst, k_demand.value_or(inst.num_demands()),
                                                  k_station.value_or(inst.num_stations()), s.seed);
  io::save_instance(clustered, out_path);
  out << "demand_points=" << clustered.num_demands() << " stations=" << clustered.num_stations()
      << " total_rate=" << std::setprecision(17) << clustered.total_rate() << '\n';
  return kOk;
}

int cmd_solve(const Settings& s, const std::string& instance_path, const std::string& method,
              const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  const auto inst = io::load_instance(instance_path);
  const auto report = solve(inst, parse_method(method), s);
  const auto text = io::report_to_json(inst, report).dump(2) + "\n";
  if (out_path) {
    io::write_text(*out_path, text);
    out << summary_line(inst, report) << '\n';
  } else {
    out << text;
    err << summary_line(inst, report) << '\n';
  }
  return report.terminated_by == Termination::Time ? kTimeout : kOk;
}

int cmd_scenarios(const Settings& s, const std::string& instance_path,
                  const std::optional<std::string>& method, const std::string& out_path,
                  std::ostream& out) {
  const auto inst = io::load_instance(instance_path);
  const Method m = method ? parse_method(*method) : s.study_method;
  const auto rows = studies::run_scenarios(inst, [&](const Instance& sub) { return solve(sub, m, s); });
  io::write_text(out_path, studies::scenarios_csv(rows, inst.charger_types()));
  int failed = 0;
  for (const auto& r : rows) failed += r.ok() ? 0 : 1;
  out << "scenarios=" << rows.size() << " infeasible=" << failed << '\n';
  return kOk;
}

int cmd_sensitivity(const Settings& s, const std::string& instance_path, const std::string& parameter,
                    const std::optional<std::string>& multipliers,
                    const std::optional<std::string>& method, const std::string& out_path,
                    std::ostream& out) {
  const auto inst = io::load_instance(instance_path);
  studies::SweepSpec sweep;
  sweep.parameter = studies::parse_sweep_parameter(parameter);
  sweep.multipliers = multipliers ? parse_list(*multipliers) : studies::default_multipliers(sweep.parameter);
  const Method m = method ? parse_method(*method) : s.study_method;
  const auto rows = studies::run_sweep(inst, sweep, [&](const Instance& x) { return solve(x, m, s); });
  io::write_text(out_path, studies::sweep_csv(sweep, rows));
  out << "parameter=" << studies::to_string(sweep.parameter) << " rows=" << rows.size() << '\n';
  return kOk;
}

int cmd_validate(const std::string& instance_path, const std::string& report_path, std::ostream& out) {
  const auto inst = io::load_instance(instance_path);
  const auto json = io::read_json(report_path);
  const auto sol = io::solution_from_json(inst, json);
  auto violations = check_feasibility(inst, sol);
  for (const auto& v : violations) {
    out << "violation " << to_string(v.constraint);
    if (v.demand >= 0 && v.demand < inst.num_demands()) out << " demand=" << inst.demand(v.demand).id;
    if (v.station >= 0 && v.station < inst.num_stations()) out << " station=" << inst.station(v.station).id;
    if (v.charger >= 0 && v.charger < inst.num_charger_types()) out << " type=" << inst.charger(v.charger).name;
    out << ": " << v.detail << '\n';
  }
  bool objective_ok = true;
  if (violations.empty()) {
    const auto cost = evaluate(inst, sol);
    const double reported = sol.cost.total;
    if (std::abs(cost.total - reported) > 1e-6 * std::max(1.0, std::abs(cost.total))) {
      objective_ok = false;
      out << std::setprecision(17) << "objective mismatch: reported " << reported << ", recomputed "
          << cost.total << '\n';
    }
  }
  const bool ok = violations.empty() && objective_ok;
  out << (ok ? "feasible" : "infeasible") << '\n';
  return ok ? kOk : kInfeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charging station location and charger allocation for battery electric buses",
               "placebeb"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit;
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--time-limit", time_limit, "Per-solve time limit in seconds");
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--preset", preset, "paper-table-sm3 | paper-s54")
      ->check(CLI::IsMember({"paper-table-sm3", "paper-s54"}));

  std::string blocks_csv, stations_csv, out_path, instance_path, report_path, method = "bnb";
  std::string parameter;
  double range = 0.0, horizon = 1440.0;
  std::optional<double> max_travel;
  std::optional<int> k_demand, k_station, runs;
  std::optional<std::string> solve_out, study_method, multipliers;

  auto* gen = app.add_subcommand("gen-demand", "Block schedules to a demand instance");
  gen->add_option("--blocks", blocks_csv, "Block schedule CSV")->required();
  gen->add_option("--stations", stations_csv, "Candidate stations CSV")->required();
  gen->add_option("--range", range, "Bus range in driving minutes")->required();
  gen->add_option("--horizon", horizon, "Minutes the schedule spans");
  gen->add_option("--max-travel", max_travel, "Coverage cutoff in minutes");
  gen->add_option("--out", out_path, "Instance JSON")->required();

  auto* clu = app.add_subcommand("cluster", "Aggregate demand points and stations");
  clu->add_option("instance", instance_path)->required();
  clu->add_option("--k-demand", k_demand);
  clu->add_option("--k-station", k_station);
  clu->add_option("--out", out_path)->required();

  auto* sol = app.add_subcommand("solve", "Solve an instance");
  sol->add_option("instance", instance_path)->required();
  sol->add_option("--method", method)->check(CLI::IsMember({"brute", "bnb", "sa", "ga"}));
  sol->add_option("--runs", runs, "Independent sa/ga runs");
  sol->add_option("--out", solve_out, "Report JSON (stdout when omitted)");

  auto* sce = app.add_subcommand("scenarios", "Joint/separate x station-regime matrix");
  sce->add_option("instance", instance_path)->required();
  sce->add_option("--method", study_method)->check(CLI::IsMember({"brute", "bnb", "sa", "ga"}));
  sce->add_option("--out", out_path)->required();

  auto* sen = app.add_subcommand("sensitivity", "One-at-a-time parameter sweep");
  sen->add_option("instance", instance_path)->required();
  sen->add_option("--parameter", parameter)
      ->required()
      ->check(CLI::IsMember({"wait_cost", "charger_power", "station_cost", "charger_cost"}));
  sen->add_option("--multipliers", multipliers, "Comma-separated list");
  sen->add_option("--method", study_method)->check(CLI::IsMember({"brute", "bnb", "sa", "ga"}));
  sen->add_option("--out", out_path)->required();

  auto* val = app.add_subcommand("validate", "Check a report against the constraints");
  val->add_option("instance", instance_path)->required();
  val->add_option("report", report_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  try {
    Settings s;
    if (preset) apply_preset(s, *preset);
    if (config_path) apply_config(s, io::read_json(*config_path));
    if (seed) s.seed = *seed;
    if (time_limit) s.time_limit_s = *time_limit;
    if (runs) s.n_runs = *runs;

    if (*gen) return cmd_gen_demand(s, blocks_csv, stations_csv, range, horizon, max_travel, out_path, out, err);
    if (*clu) return cmd_cluster(s, instance_path, k_demand, k_station, out_path, out);
    if (*sol) return cmd_solve(s, instance_path, method, solve_out, out, err);
    if (*sce) return cmd_scenarios(s, instance_path, study_method, out_path, out);
    if (*sen) return cmd_sensitivity(s, instance_path, parameter, multipliers, study_method, out_path, out);
    if (*val) return cmd_validate(instance_path, report_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kFailure;
}

}  // namespace placebeb::cli
