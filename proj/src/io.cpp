#include "placebeb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "placebeb/error.hpp"
#include "placebeb/queueing.hpp"

namespace placebeb::io {
namespace {

[[noreturn]] void parse_error(const std::string& message) {
  throw Error(ErrorCode::Parse, message);
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) parse_error(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(where + ": bad '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key, where);
}

std::string id_text(const Json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  parse_error(where + ": id must be a string or integer");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json instance_to_json(const Instance& instance) {
  const auto& d = instance.data();
  Json out;
  out["demand_points"] = Json::array();
  for (const auto& p : d.demand_points) {
    Json reach = Json::array();
    for (int j : p.reachable_stations) reach.push_back(d.stations[j].id);
    out["demand_points"].push_back({{"id", p.id},
                                    {"lat", p.location.lat},
                                    {"lon", p.location.lon},
                                    {"rate", p.rate},
                                    {"agency", p.agency},
                                    {"reachable_stations", reach}});
  }
  out["stations"] = Json::array();
  for (const auto& s : d.stations) {
    out["stations"].push_back({{"id", s.id},
                               {"lat", s.location.lat},
                               {"lon", s.location.lon},
                               {"fixed_cost_rate", s.fixed_cost_rate},
                               {"max_chargers", s.max_chargers},
                               {"is_garage", s.is_garage},
                               {"agency", s.agency}});
  }
  out["charger_types"] = Json::array();
  for (const auto& k : d.charger_types) {
    out["charger_types"].push_back({{"id", k.id},
                                    {"name", k.name},
                                    {"power_kw", k.power_kw},
                                    {"unit_cost_rate", k.unit_cost_rate},
                                    {"recharge_time", k.recharge_time},
                                    {"service_rate", k.service_rate}});
  }
  out["costs"] = {{"travel_cost_rate", d.costs.travel}, {"wait_cost_rate", d.costs.wait}};
  out["travel"] = Json::array();
  for (std::size_t i = 0; i < d.demand_points.size(); ++i) {
    for (int j : d.demand_points[i].reachable_stations) {
      out["travel"].push_back({{"demand", d.demand_points[i].id},
                               {"station", d.stations[j].id},
                               {"minutes", d.travel_time[i][j]}});
    }
  }
  Json options = {{"epsilon", d.options.epsilon},
                  {"enforce_proximity", d.options.enforce_proximity},
                  {"speed_kmh", d.options.speed_kmh}};
  if (d.options.max_travel_minutes) options["max_travel_minutes"] = *d.options.max_travel_minutes;
  out["options"] = options;
  if (d.battery) {
    out["battery"] = {{"capacity_kwh", d.battery->capacity_kwh},
                      {"soc_start_pct", d.battery->soc_start_pct},
                      {"soc_end_pct", d.battery->soc_end_pct}};
  }
  return out;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) parse_error("instance: top level must be an object");
  InstanceData data;

  const Json& opt = j.contains("options") ? j.at("options") : Json::object();
  data.options.epsilon = get_or<double>(opt, "epsilon", 1e-6, "options");
  data.options.enforce_proximity = get_or<bool>(opt, "enforce_proximity", false, "options");
  data.options.speed_kmh = get_or<double>(opt, "speed_kmh", 30.0, "options");
  if (opt.contains("max_travel_minutes") && !opt.at("max_travel_minutes").is_null()) {
    data.options.max_travel_minutes = get<double>(opt, "max_travel_minutes", "options");
  }

  if (j.contains("battery") && !j.at("battery").is_null()) {
    const auto& b = j.at("battery");
    data.battery = BatterySpec{get<double>(b, "capacity_kwh", "battery"),
                               get<double>(b, "soc_start_pct", "battery"),
                               get<double>(b, "soc_end_pct", "battery")};
  }

  const auto& types = j.contains("charger_types") ? j.at("charger_types") : Json::array();
  bool needs_derivation = false;
  for (std::size_t k = 0; k < types.size(); ++k) {
    const auto where = "charger_types[" + std::to_string(k) + "]";
    ChargerType t;
    t.id = get_or<int>(types[k], "id", static_cast<int>(k), where);
    t.name = get_or<std::string>(types[k], "name", "type" + std::to_string(t.id), where);
    t.power_kw = get<double>(types[k], "power_kw", where);
    t.unit_cost_rate = get<double>(types[k], "unit_cost_rate", where);
    const double rt = get_or<double>(types[k], "recharge_time", 0.0, where);
    const double sr = get_or<double>(types[k], "service_rate", 0.0, where);
    if (rt > 0.0) {
      t.recharge_time = rt;
      t.service_rate = sr > 0.0 ? sr : 1.0 / rt;
    } else if (sr > 0.0) {
      t.service_rate = sr;
      t.recharge_time = 1.0 / sr;
    } else {
      needs_derivation = true;
    }
    data.charger_types.push_back(t);
  }
  if (needs_derivation) {
    if (!data.battery) parse_error("charger_types: rates missing and no battery to derive them");
    data.charger_types = derive_service_rates(data.battery->capacity_kwh,
                                              data.battery->soc_start_pct,
                                              data.battery->soc_end_pct, data.charger_types);
  }

  std::unordered_map<std::string, int> station_index;
  const auto& stations = j.contains("stations") ? j.at("stations") : Json::array();
  for (std::size_t s = 0; s < stations.size(); ++s) {
    const auto where = "stations[" + std::to_string(s) + "]";
    const auto& js = stations[s];
    CandidateStation st;
    st.id = id_text(js.at("id"), where);
    st.location = {get_or<double>(js, "lat", 0.0, where), get_or<double>(js, "lon", 0.0, where)};
    st.fixed_cost_rate = get<double>(js, "fixed_cost_rate", where);
    if (js.contains("max_chargers") && js.at("max_chargers").is_number_integer()) {
      st.max_chargers.assign(data.charger_types.size(), js.at("max_chargers").get<int>());
    } else {
      st.max_chargers = get<std::vector<int>>(js, "max_chargers", where);
    }
    st.is_garage = get_or<bool>(js, "is_garage", false, where);
    st.agency = get_or<std::string>(js, "agency", "", where);
    if (!station_index.emplace(st.id, static_cast<int>(s)).second) {
      parse_error(where + ": duplicate station id '" + st.id + "'");
    }
    data.stations.push_back(std::move(st));
  }

  std::unordered_map<std::string, int> demand_index;
  const auto& demands = j.contains("demand_points") ? j.at("demand_points") : Json::array();
  bool explicit_reach = false;
  std::vector<std::vector<int>> listed(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const auto where = "demand_points[" + std::to_string(i) + "]";
    const auto& jd = demands[i];
    DemandPoint p;
    p.id = id_text(jd.at("id"), where);
    p.location = {get_or<double>(jd, "lat", 0.0, where), get_or<double>(jd, "lon", 0.0, where)};
    p.rate = get<double>(jd, "rate", where);
    p.agency = get_or<std::string>(jd, "agency", "", where);
    if (jd.contains("reachable_stations")) {
      explicit_reach = true;
      for (const auto& sid : jd.at("reachable_stations")) {
        const auto name = id_text(sid, where);
        auto it = station_index.find(name);
        if (it == station_index.end()) parse_error(where + ": unknown station '" + name + "'");
        listed[i].push_back(it->second);
      }
    }
    if (!demand_index.emplace(p.id, static_cast<int>(i)).second) {
      parse_error(where + ": duplicate demand id '" + p.id + "'");
    }
    data.demand_points.push_back(std::move(p));
  }

  const auto n = data.demand_points.size();
  const auto m = data.stations.size();
  data.travel_time.assign(n, std::vector<double>(m, std::numeric_limits<double>::infinity()));
  if (j.contains("travel") && !j.at("travel").empty()) {
    for (const auto& t : j.at("travel")) {
      const auto di = demand_index.find(id_text(t.at("demand"), "travel"));
      const auto sj = station_index.find(id_text(t.at("station"), "travel"));
      if (di == demand_index.end() || sj == station_index.end()) {
        parse_error("travel: unknown demand or station id");
      }
      data.travel_time[di->second][sj->second] = get<double>(t, "minutes", "travel");
      if (!explicit_reach) data.demand_points[di->second].reachable_stations.push_back(sj->second);
    }
    if (explicit_reach) {
      for (std::size_t i = 0; i < n; ++i) data.demand_points[i].reachable_stations = listed[i];
    }
  } else if (explicit_reach) {
    for (std::size_t i = 0; i < n; ++i) {
      data.demand_points[i].reachable_stations = listed[i];
      for (int s : listed[i]) {
        data.travel_time[i][s] = demand::travel_minutes(data.demand_points[i].location,
                                                        data.stations[s].location,
                                                        data.options.speed_kmh);
      }
    }
  } else if (n > 0) {
    if (!data.options.max_travel_minutes) {
      parse_error("instance: no travel data, reachable_stations or max_travel_minutes");
    }
    auto cov = demand::build_coverage(data.demand_points, data.stations,
                                      *data.options.max_travel_minutes, data.options.speed_kmh);
    for (std::size_t i = 0; i < n; ++i) {
      data.demand_points[i].reachable_stations = std::move(cov.reachable[i]);
    }
    data.travel_time = std::move(cov.travel_time);
  }

  const auto& c = j.contains("costs") ? j.at("costs") : Json::object();
  data.costs.travel = get<double>(c, "travel_cost_rate", "costs");
  data.costs.wait = get<double>(c, "wait_cost_rate", "costs");

  try {
    return Instance(std::move(data));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) parse_error(e.what());
    throw;
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json(path));
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text(path, instance_to_json(instance).dump(2) + "\n");
}

Json solution_to_json(const Instance& instance, const Solution& solution) {
  Json out;
  out["objective"] = {{"total", solution.cost.total},
                      {"station", solution.cost.station},
                      {"charger", solution.cost.charger},
                      {"travel", solution.cost.travel},
                      {"waiting", solution.cost.waiting}};
  out["active_stations"] = Json::array();
  for (int j : solution.active) out["active_stations"].push_back(instance.station(j).id);

  const auto loads = station_loads(instance, solution.assignments);
  out["chargers"] = Json::array();
  for (int j = 0; j < instance.num_stations(); ++j) {
    for (int k = 0; k < instance.num_charger_types(); ++k) {
      const int s = solution.chargers[j][k];
      if (s == 0) continue;
      const double mu = instance.charger(k).service_rate;
      out["chargers"].push_back({{"station", instance.station(j).id},
                                 {"type", instance.charger(k).id},
                                 {"count", s},
                                 {"load", loads[j][k]},
                                 {"wait", solution.waits[j][k]},
                                 {"utilization", loads[j][k] / (mu * s)}});
    }
  }
  out["assignments"] = Json::array();
  for (std::size_t a = 0; a < solution.assignments.size(); ++a) {
    const auto& x = solution.assignments[a];
    Json row = {{"demand", instance.demand(x.demand).id},
                {"station", instance.station(x.station).id},
                {"type", instance.charger(x.charger).id}};
    if (a < solution.cost.per_assignment.size()) row["q"] = solution.cost.per_assignment[a];
    out["assignments"].push_back(row);
  }
  return out;
}

Solution solution_from_json(const Instance& instance, const Json& j) {
  std::unordered_map<std::string, int> demand_idx, station_idx;
  std::unordered_map<int, int> type_idx;
  for (int i = 0; i < instance.num_demands(); ++i) demand_idx[instance.demand(i).id] = i;
  for (int s = 0; s < instance.num_stations(); ++s) station_idx[instance.station(s).id] = s;
  for (int k = 0; k < instance.num_charger_types(); ++k) type_idx[instance.charger(k).id] = k;
  auto station_of = [&](const Json& v) {
    auto it = station_idx.find(id_text(v, "solution"));
    if (it == station_idx.end()) parse_error("solution: unknown station " + v.dump());
    return it->second;
  };
  auto type_of = [&](const Json& v) {
    auto it = type_idx.find(v.get<int>());
    if (it == type_idx.end()) parse_error("solution: unknown charger type " + v.dump());
    return it->second;
  };

  Solution sol;
  sol.chargers.assign(instance.num_stations(), std::vector<int>(instance.num_charger_types(), 0));
  sol.waits.assign(instance.num_stations(), std::vector<double>(instance.num_charger_types(), 0.0));
  try {
    for (const auto& s : j.at("active_stations")) sol.active.push_back(station_of(s));
    for (const auto& c : j.at("chargers")) {
      const int st = station_of(c.at("station"));
      const int k = type_of(c.at("type"));
      sol.chargers[st][k] = c.at("count").get<int>();
      sol.waits[st][k] = c.at("wait").get<double>();
    }
    for (const auto& a : j.at("assignments")) {
      auto it = demand_idx.find(id_text(a.at("demand"), "solution"));
      if (it == demand_idx.end()) parse_error("solution: unknown demand " + a.at("demand").dump());
      sol.assignments.push_back({it->second, station_of(a.at("station")), type_of(a.at("type"))});
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("solution: ") + e.what());
  }
  if (j.contains("objective")) {
    const auto& o = j.at("objective");
    sol.cost.total = get_or<double>(o, "total", 0.0, "objective");
    sol.cost.station = get_or<double>(o, "station", 0.0, "objective");
    sol.cost.charger = get_or<double>(o, "charger", 0.0, "objective");
    sol.cost.travel = get_or<double>(o, "travel", 0.0, "objective");
    sol.cost.waiting = get_or<double>(o, "waiting", 0.0, "objective");
  }
  return sol;
}

Json report_to_json(const Instance& instance, const SolverReport& report) {
  Json out;
  out["method"] = report.method;
  out["terminated_by"] = to_string(report.terminated_by);
  const auto sol = solution_to_json(instance, report.best);
  out["objective"] = sol["objective"];
  out["lower_bound"] = report.lower_bound ? Json(*report.lower_bound) : Json(nullptr);
  out["upper_bound"] = report.upper_bound;
  out["gap"] = report.gap ? Json(*report.gap) : Json(nullptr);
  out["active_stations"] = sol["active_stations"];
  out["chargers"] = sol["chargers"];
  out["assignments"] = sol["assignments"];
  Json cuts = Json::array();
  for (const auto& c : report.cuts) {
    cuts.push_back({{"station", instance.station(c.station).id},
                    {"type", instance.charger(c.charger).id},
                    {"servers", c.servers},
                    {"anchor_rho", c.anchor_rho}});
  }
  out["stats"] = {{"nodes_explored", report.nodes_explored},
                  {"cuts_added", report.cuts_added},
                  {"iterations", report.iterations},
                  {"clamp_events", report.clamp_events},
                  {"run_costs", report.run_costs},
                  {"distinct_solutions", report.distinct_solutions},
                  {"big_m", report.big_m},
                  {"cuts", cuts}};
  out["metadata"] = {{"time_to_best_s", report.time_to_best_s},
                     {"elapsed_s", report.elapsed_s}};
  return out;
}

Json strip_metadata(Json j) {
  if (j.is_object()) j.erase("metadata");
  return j;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<int>(c);
  }
  return -1;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    const char ch = line[p];
    if (quoted) {
      if (ch == '"' && p + 1 < line.size() && line[p + 1] == '"') {
        cell.push_back('"');
        ++p;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  if (quoted) parse_error(where + ": unterminated quote");
  out.push_back(trim(cell));
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_error(where + ": expected a number, got '" + s + "'");
  }
}

bool to_bool(const std::string& s, const std::string& where) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "1" || t == "true" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "no" || t.empty()) return false;
  parse_error(where + ": expected a boolean, got '" + s + "'");
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const auto where = source + ":" + std::to_string(line_no);
    auto cells = split_csv_line(line, where);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      parse_error(where + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                  std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

namespace {

std::vector<int> require_columns(const CsvTable& t, const std::vector<std::string>& names,
                                 const std::string& source) {
  std::vector<int> idx;
  for (const auto& n : names) {
    const int c = t.column(n);
    if (c < 0) parse_error(source + ": missing column '" + n + "'");
    idx.push_back(c);
  }
  return idx;
}

}  // namespace

std::vector<demand::BlockSchedule> read_blocks_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto src = path.string();
  std::vector<demand::BlockSchedule> blocks;
  if (t.header.empty()) return blocks;
  const auto c = require_columns(t,
                                 {"block_id", "garage_id", "trip_id", "kind", "origin_stop",
                                  "dest_stop", "origin_lat", "origin_lon", "dest_lat", "dest_lon",
                                  "start_min", "end_min"},
                                 src);
  const int agency_col = t.column("agency");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto where = src + ":" + std::to_string(t.line_numbers[r]);
    auto [it, fresh] = index.emplace(row[c[0]], blocks.size());
    if (fresh) {
      demand::BlockSchedule b;
      b.id = row[c[0]];
      b.garage_id = row[c[1]];
      if (agency_col >= 0) b.agency = row[agency_col];
      blocks.push_back(std::move(b));
    }
    auto& b = blocks[it->second];
    if (b.garage_id != row[c[1]]) parse_error(where + ": garage differs within block " + b.id);
    demand::Trip trip;
    trip.id = row[c[2]];
    try {
      trip.kind = demand::parse_trip_kind(row[c[3]]);
    } catch (const Error&) {
      parse_error(where + ": unknown trip kind '" + row[c[3]] + "'");
    }
    trip.origin = {row[c[4]], {to_double(row[c[6]], where), to_double(row[c[7]], where)}};
    trip.destination = {row[c[5]], {to_double(row[c[8]], where), to_double(row[c[9]], where)}};
    trip.start = to_double(row[c[10]], where);
    trip.end = to_double(row[c[11]], where);
    b.trips.push_back(std::move(trip));
  }
  return blocks;
}

std::vector<CandidateStation> read_stations_csv(const std::filesystem::path& path,
                                                const std::vector<ChargerType>& charger_types,
                                                int default_max_chargers) {
  const auto t = read_csv(path);
  const auto src = path.string();
  std::vector<CandidateStation> out;
  if (t.header.empty()) return out;
  const auto c = require_columns(
      t, {"station_id", "lat", "lon", "is_garage", "fixed_cost_usd", "lifetime_years"}, src);
  const int agency_col = t.column("agency");
  const int max_col = t.column("max_chargers");
  std::vector<int> per_type;
  for (const auto& k : charger_types) per_type.push_back(t.column("max_chargers_" + k.name));

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto where = src + ":" + std::to_string(t.line_numbers[r]);
    CandidateStation s;
    s.id = row[c[0]];
    s.location = {to_double(row[c[1]], where), to_double(row[c[2]], where)};
    s.is_garage = to_bool(row[c[3]], where);
    const double capital = to_double(row[c[4]], where);
    const double years = to_double(row[c[5]], where);
    if (!(years > 0.0)) parse_error(where + ": lifetime_years must be > 0");
    s.fixed_cost_rate = per_minute_rate(capital, years);
    if (agency_col >= 0) s.agency = row[agency_col];
    const int base = max_col >= 0 ? static_cast<int>(to_double(row[max_col], where))
                                  : default_max_chargers;
    for (std::size_t k = 0; k < charger_types.size(); ++k) {
      s.max_chargers.push_back(per_type[k] >= 0
                                   ? static_cast<int>(to_double(row[per_type[k]], where))
                                   : base);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace placebeb::io
