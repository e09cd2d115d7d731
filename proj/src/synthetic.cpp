#include "placebeb/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "placebeb/demand.hpp"
#include "placebeb/error.hpp"
#include "placebeb/presets.hpp"

namespace placebeb::synthetic {
namespace {

constexpr GeoPoint kOrigin{41.88, -87.63};
constexpr double kKmPerDegree = 111.195;

GeoPoint offset(double x_km, double y_km) {
  const double lat = kOrigin.lat + y_km / kKmPerDegree;
  const double lon =
      kOrigin.lon + x_km / (kKmPerDegree * std::cos(kOrigin.lat * std::numbers::pi / 180.0));
  return {lat, lon};
}

std::string agency_name(int a) { return std::string(1, static_cast<char>('A' + a)); }

}  // namespace

Instance random_instance(const Spec& spec, std::uint64_t seed) {
  if (spec.demands < 0 || spec.stations < 1 || spec.charger_types < 1 || spec.agencies < 1) {
    throw Error(ErrorCode::InvalidArgument, "synthetic: sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, spec.area_km);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  InstanceData data;
  data.options.speed_kmh = spec.speed_kmh;
  data.options.enforce_proximity = spec.enforce_proximity;
  data.options.max_travel_minutes = spec.max_travel_minutes;

  if (spec.profile == Profile::Transit) {
    if (spec.charger_types > 2) {
      throw Error(ErrorCode::InvalidArgument, "synthetic: transit profile has two charger types");
    }
    const auto base = presets::transit_baseline();
    auto types = base.charger_types();
    types.resize(spec.charger_types);
    data.charger_types = types;
    data.costs = base.costs;
    data.battery = base.battery;
  } else {
    for (int k = 0; k < spec.charger_types; ++k) {
      ChargerType t;
      t.id = k;
      t.name = "type" + std::to_string(k);
      t.power_kw = 100.0 * (k + 1);
      t.service_rate = uniform(0.2, 1.0);
      t.recharge_time = 1.0 / t.service_rate;
      t.unit_cost_rate = uniform(0.1, 1.0);
      data.charger_types.push_back(t);
    }
    data.costs = {1.0, 1.0};
  }

  const double station_rate =
      spec.profile == Profile::Transit ? presets::transit_baseline().station_cost_rate() : 0.0;
  const int garages_per_agency = std::max(
      1, static_cast<int>(std::lround(spec.garage_fraction * spec.stations / spec.agencies)));
  for (int j = 0; j < spec.stations; ++j) {
    CandidateStation s;
    s.id = "S" + std::to_string(j);
    s.location = offset(coord(rng), coord(rng));
    s.fixed_cost_rate = spec.profile == Profile::Transit ? station_rate : uniform(0.5, 3.0);
    s.max_chargers.assign(spec.charger_types, spec.max_chargers);
    s.agency = agency_name(j % spec.agencies);
    s.is_garage = j / spec.agencies < garages_per_agency;
    data.stations.push_back(std::move(s));
  }
  for (int i = 0; i < spec.demands; ++i) {
    DemandPoint p;
    p.id = "D" + std::to_string(i);
    p.location = offset(coord(rng), coord(rng));
    p.rate = spec.profile == Profile::Transit ? uniform(0.005, 0.05) : uniform(0.05, 0.5);
    p.agency = agency_name(i % spec.agencies);
    data.demand_points.push_back(std::move(p));
  }

  const auto inf = std::numeric_limits<double>::infinity();
  data.travel_time.assign(spec.demands, std::vector<double>(spec.stations, inf));
  for (int i = 0; i < spec.demands; ++i) {
    auto& p = data.demand_points[i];
    int nearest = 0;
    double nearest_t = inf;
    for (int j = 0; j < spec.stations; ++j) {
      const double t =
          demand::travel_minutes(p.location, data.stations[j].location, spec.speed_kmh);
      if (t < nearest_t) {
        nearest_t = t;
        nearest = j;
      }
      if (t <= spec.max_travel_minutes) {
        p.reachable_stations.push_back(j);
        data.travel_time[i][j] = t;
      }
    }
    if (p.reachable_stations.empty()) {
      p.reachable_stations.push_back(nearest);
      data.travel_time[i][nearest] = nearest_t;
    }
  }
  return Instance(std::move(data));
}

}  // namespace placebeb::synthetic
