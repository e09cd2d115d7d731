#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "placebeb/demand.hpp"
#include "placebeb/model.hpp"
#include "placebeb/report.hpp"

namespace placebeb::io {

using Json = nlohmann::ordered_json;

// Instance <-> JSON. Reading accepts three coverage forms, in priority order:
// explicit `travel` triplets, per-demand `reachable_stations` (travel from
// haversine distance at options.speed_kmh), or options.max_travel_minutes.
// Charger types missing rates are derived from `battery` when present.
// Writing always emits reachable_stations and travel triplets so a reload is
// exact. Errors are reported as ErrorCode::Parse.
Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

Json solution_to_json(const Instance& instance, const Solution& solution);
// Reads active stations, charger counts, waits and assignments by id.
Solution solution_from_json(const Instance& instance, const Json& j);

// Everything time-dependent is confined to the "metadata" member.
Json report_to_json(const Instance& instance, const SolverReport& report);
Json strip_metadata(Json j);

// Minimal CSV reader: header row, comma separated, optional double quotes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

// Blocks in first-seen order; movements in file order.
std::vector<demand::BlockSchedule> read_blocks_csv(const std::filesystem::path& path);

// Stations CSV: station_id, lat, lon, is_garage, fixed_cost_usd,
// lifetime_years, plus optional agency and max_chargers columns (a single
// max_chargers, or max_chargers_<type name> per type).
std::vector<CandidateStation> read_stations_csv(const std::filesystem::path& path,
                                                const std::vector<ChargerType>& charger_types,
                                                int default_max_chargers);

// %.17g; the text format used for every floating-point CSV cell.
std::string format_double(double v);

}  // namespace placebeb::io
