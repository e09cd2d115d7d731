#pragma once

// Block schedules -> charging demand points -> coverage sets, plus k-means
// aggregation of demand points and candidate stations.

#include <cstdint>
#include <string>
#include <vector>

#include "placebeb/model.hpp"

namespace placebeb::demand {

enum class TripKind { Service, Deadhead, Layover };

TripKind parse_trip_kind(const std::string& text);
const char* to_string(TripKind kind) noexcept;

struct Stop {
  std::string id;
  GeoPoint location;
};

struct Trip {
  std::string id;
  Stop origin;
  Stop destination;
  double start = 0.0;  // minutes from midnight
  double end = 0.0;
  TripKind kind = TripKind::Service;

  // Energy-consuming time; layovers consume none.
  double driving_minutes() const { return kind == TripKind::Layover ? 0.0 : end - start; }
};

struct BlockSchedule {
  std::string id;
  std::string garage_id;
  std::string agency;
  std::vector<Trip> trips;
};

struct DemandEvent {
  std::string block_id;
  std::string stop_id;
  double time = 0.0;
  GeoPoint location;
  std::string agency;
};

// Throws InvalidBlock unless trips are time ordered without overlap and the
// first and last movements touch the garage.
void validate_block(const BlockSchedule& block);

// Walks the block accumulating driving time. When the next movement would
// take the total past range_minutes, the bus charges at the terminal it is
// standing at (the end of the last completed movement) and starts again with
// a full battery. Throws RangeTooShort if a single movement exceeds the range.
std::vector<DemandEvent> segment_block(const BlockSchedule& block, double range_minutes);

// One demand point per stop id in first-seen order, rate = count / horizon.
std::vector<DemandPoint> aggregate_demand(const std::vector<DemandEvent>& events,
                                          double horizon_minutes = 1440.0);

double haversine_km(const GeoPoint& a, const GeoPoint& b);
double travel_minutes(const GeoPoint& a, const GeoPoint& b, double speed_kmh);

struct Coverage {
  std::vector<std::vector<int>> reachable;  // J_i, ascending station indices
  std::vector<std::vector<int>> served;     // I_j, ascending demand indices
  // Minutes; +infinity outside the covered pairs.
  std::vector<std::vector<double>> travel_time;
};

// Throws InfeasibleDemand with every uncovered demand id in details().
Coverage build_coverage(const std::vector<DemandPoint>& demand_points,
                        const std::vector<CandidateStation>& stations, double max_travel_minutes,
                        double speed_kmh);

// Assembles an Instance, filling reachable_stations and the travel matrix
// from build_coverage.
Instance make_instance(std::vector<DemandPoint> demand_points,
                       std::vector<CandidateStation> stations,
                       std::vector<ChargerType> charger_types, CostRates costs,
                       InstanceOptions options, double max_travel_minutes);

// Partition labels for weighted k-means (k-means++ seeding, Lloyd
// iterations) on an equirectangular projection at the median latitude.
std::vector<int> kmeans_labels(const std::vector<GeoPoint>& points,
                               const std::vector<double>& weights, int k, std::uint64_t seed);

// Aggregated demand points: summed rates, rate-weighted centroids. Points are
// only merged within the same agency; k must be at least the agency count.
std::vector<DemandPoint> cluster_demands(const std::vector<DemandPoint>& points, int k,
                                         std::uint64_t seed);

// Aggregated stations: minimum fixed cost, maximum capacity per type. Merges
// happen only within one (is_garage, agency) group.
std::vector<CandidateStation> cluster_stations(const std::vector<CandidateStation>& stations,
                                               int k, std::uint64_t seed);

// Clusters both sides and rebuilds coverage with the instance's
// max_travel_minutes option. k equal to the current counts returns the
// instance unchanged.
Instance cluster_instance(const Instance& instance, int k_demand, int k_station,
                          std::uint64_t seed);

}  // namespace placebeb::demand
