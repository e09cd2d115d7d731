#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "placebeb/cli.hpp"
#include "placebeb/demand.hpp"
#include "placebeb/error.hpp"
#include "placebeb/io.hpp"
#include "placebeb/queueing.hpp"
#include "placebeb/synthetic.hpp"

namespace py = pybind11;
using namespace placebeb;

namespace {

Instance parse_instance(const std::string& text) { return io::instance_from_json(io::Json::parse(text)); }

std::string solve_json(const std::string& instance_json, const std::string& method,
                       const std::string& config_json) {
  const auto inst = parse_instance(instance_json);
  cli::Settings s;
  cli::apply_config(s, io::Json::parse(config_json));
  SolverReport report;
  {
    py::gil_scoped_release release;
    report = cli::solve(inst, parse_method(method), s);
  }
  return io::report_to_json(inst, report).dump();
}

std::string random_instance_json(std::uint64_t seed, int demands, int stations, int charger_types,
                                 const std::string& profile, int agencies, bool enforce_proximity,
                                 double max_travel_minutes) {
  synthetic::Spec spec;
  spec.demands = demands;
  spec.stations = stations;
  spec.charger_types = charger_types;
  if (profile == "abstract") {
    spec.profile = synthetic::Profile::Abstract;
  } else if (profile == "transit") {
    spec.profile = synthetic::Profile::Transit;
  } else {
    throw Error(ErrorCode::InvalidArgument, "profile must be 'abstract' or 'transit'");
  }
  spec.agencies = agencies;
  spec.enforce_proximity = enforce_proximity;
  spec.max_travel_minutes = max_travel_minutes;
  return io::instance_to_json(synthetic::random_instance(spec, seed)).dump();
}

py::dict evaluate_json(const std::string& instance_json, const std::string& solution_json) {
  const auto inst = parse_instance(instance_json);
  const auto sol = io::solution_from_json(inst, io::Json::parse(solution_json));
  const auto c = evaluate(inst, sol);
  py::dict d;
  d["station"] = c.station;
  d["charger"] = c.charger;
  d["travel"] = c.travel;
  d["waiting"] = c.waiting;
  d["total"] = c.total;
  return d;
}

std::vector<std::string> violations_json(const std::string& instance_json,
                                         const std::string& solution_json) {
  const auto inst = parse_instance(instance_json);
  const auto sol = io::solution_from_json(inst, io::Json::parse(solution_json));
  std::vector<std::string> out;
  for (const auto& v : check_feasibility(inst, sol)) {
    out.push_back(std::string(to_string(v.constraint)) + ": " + v.detail);
  }
  return out;
}

std::vector<py::dict> segment_csv(const std::string& blocks_csv, double range_minutes) {
  std::vector<py::dict> out;
  for (const auto& b : io::read_blocks_csv(blocks_csv)) {
    for (const auto& e : demand::segment_block(b, range_minutes)) {
      py::dict d;
      d["block_id"] = e.block_id;
      d["stop_id"] = e.stop_id;
      d["time"] = e.time;
      d["lat"] = e.location.lat;
      d["lon"] = e.location.lon;
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::string cluster_json(const std::string& instance_json, int k_demand, int k_station,
                         std::uint64_t seed) {
  return io::instance_to_json(demand::cluster_instance(parse_instance(instance_json), k_demand,
                                                       k_station, seed))
      .dump();
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Charging station location and charger allocation core";

  py::register_exception<Error>(m, "PlacebebError", PyExc_RuntimeError);

  m.def("erlang_c", [](double arrival, double service, int servers) {
    return queueing::erlang_c({arrival, service, servers});
  }, py::arg("arrival_rate"), py::arg("service_rate"), py::arg("servers"));
  m.def("expected_wait", [](double arrival, double service, int servers) {
    return queueing::expected_wait({arrival, service, servers});
  }, py::arg("arrival_rate"), py::arg("service_rate"), py::arg("servers"));

  m.def("random_instance", &random_instance_json, py::arg("seed"), py::arg("demands") = 5,
        py::arg("stations") = 4, py::arg("charger_types") = 2, py::arg("profile") = "abstract",
        py::arg("agencies") = 1, py::arg("enforce_proximity") = false,
        py::arg("max_travel_minutes") = 15.0);
  m.def("solve", &solve_json, py::arg("instance"), py::arg("method") = "bnb",
        py::arg("config") = "{}");
  m.def("evaluate", &evaluate_json, py::arg("instance"), py::arg("solution"));
  m.def("check_feasibility", &violations_json, py::arg("instance"), py::arg("solution"));
  m.def("segment_blocks", &segment_csv, py::arg("blocks_csv"), py::arg("range_minutes"));
  m.def("cluster", &cluster_json, py::arg("instance"), py::arg("k_demand"), py::arg("k_station"),
        py::arg("seed") = 0);
  m.def("run_cli", &run_cli, py::arg("args"));
}
