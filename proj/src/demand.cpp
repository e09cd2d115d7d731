#include "placebeb/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>

#include "placebeb/error.hpp"

namespace placebeb::demand {
namespace {

constexpr double kEarthRadiusKm = 6371.0;

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::string minutes_label(double m) {
  return std::to_string(static_cast<long long>(std::llround(m))) + " min";
}

}  // namespace

TripKind parse_trip_kind(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "service" || t == "trip") return TripKind::Service;
  if (t == "deadhead") return TripKind::Deadhead;
  if (t == "layover") return TripKind::Layover;
  throw Error(ErrorCode::Parse, "unknown trip kind '" + text + "'");
}

const char* to_string(TripKind kind) noexcept {
  switch (kind) {
    case TripKind::Service: return "service";
    case TripKind::Deadhead: return "deadhead";
    case TripKind::Layover: return "layover";
  }
  return "unknown";
}

void validate_block(const BlockSchedule& block) {
  auto fail = [&block](const std::string& why) {
    throw Error(ErrorCode::InvalidBlock, "block " + block.id + ": " + why, {block.id});
  };
  if (block.trips.empty()) fail("no movements");
  for (std::size_t t = 0; t < block.trips.size(); ++t) {
    const auto& trip = block.trips[t];
    if (trip.end < trip.start) fail("movement " + trip.id + " ends before it starts");
    if (trip.kind == TripKind::Service && trip.origin.id == trip.destination.id &&
        !(trip.end > trip.start)) {
      fail("service trip " + trip.id + " is a zero-length loop");
    }
    if (t > 0 && trip.start < block.trips[t - 1].end) {
      fail("movement " + trip.id + " overlaps the previous one");
    }
  }
  if (block.trips.front().origin.id != block.garage_id) fail("does not start at the garage");
  if (block.trips.back().destination.id != block.garage_id) fail("does not end at the garage");
}

std::vector<DemandEvent> segment_block(const BlockSchedule& block, double range_minutes) {
  if (!(range_minutes > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "range must be > 0");
  }
  validate_block(block);

  std::vector<DemandEvent> events;
  double used = 0.0;
  const Trip* previous = nullptr;
  for (const auto& trip : block.trips) {
    const double d = trip.driving_minutes();
    if (d > range_minutes) {
      throw Error(ErrorCode::RangeTooShort,
                  "block " + block.id + ": movement " + trip.id + " needs " + minutes_label(d) +
                      " of range, only " + minutes_label(range_minutes) + " available",
                  {block.id});
    }
    if (used + d > range_minutes) {
      // previous is non-null: used > 0 requires an earlier driving movement.
      events.push_back({block.id, previous->destination.id, previous->end,
                        previous->destination.location, block.agency});
      used = 0.0;
    }
    used += d;
    previous = &trip;
  }
  return events;
}

std::vector<DemandPoint> aggregate_demand(const std::vector<DemandEvent>& events,
                                          double horizon_minutes) {
  if (!(horizon_minutes > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be > 0");
  }
  std::vector<DemandPoint> points;
  std::vector<long> counts;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& e : events) {
    auto [it, inserted] = index.emplace(e.stop_id, points.size());
    if (inserted) {
      DemandPoint p;
      p.id = e.stop_id;
      p.location = e.location;
      p.agency = e.agency;
      points.push_back(std::move(p));
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].rate = static_cast<double>(counts[i]) / horizon_minutes;
  }
  return points;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = radians(b.lat - a.lat);
  const double dlon = radians(b.lon - a.lon);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(radians(a.lat)) * std::cos(radians(b.lat)) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double travel_minutes(const GeoPoint& a, const GeoPoint& b, double speed_kmh) {
  return haversine_km(a, b) / speed_kmh * 60.0;
}

Coverage build_coverage(const std::vector<DemandPoint>& demand_points,
                        const std::vector<CandidateStation>& stations, double max_travel_minutes,
                        double speed_kmh) {
  if (!(max_travel_minutes > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "max travel time must be > 0");
  }
  if (!(speed_kmh > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed must be > 0");

  const auto n = demand_points.size();
  const auto m = stations.size();
  Coverage cov;
  cov.reachable.resize(n);
  cov.served.resize(m);
  cov.travel_time.assign(n, std::vector<double>(m, std::numeric_limits<double>::infinity()));
  std::vector<std::string> uncovered;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double t = travel_minutes(demand_points[i].location, stations[j].location, speed_kmh);
      if (t <= max_travel_minutes) {
        cov.travel_time[i][j] = t;
        cov.reachable[i].push_back(static_cast<int>(j));
        cov.served[j].push_back(static_cast<int>(i));
      }
    }
    if (cov.reachable[i].empty()) uncovered.push_back(demand_points[i].id);
  }
  if (!uncovered.empty()) {
    std::string list;
    for (const auto& id : uncovered) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::InfeasibleDemand, "no station within reach of: " + list, uncovered);
  }
  return cov;
}

Instance make_instance(std::vector<DemandPoint> demand_points,
                       std::vector<CandidateStation> stations,
                       std::vector<ChargerType> charger_types, CostRates costs,
                       InstanceOptions options, double max_travel_minutes) {
  auto cov = build_coverage(demand_points, stations, max_travel_minutes, options.speed_kmh);
  for (std::size_t i = 0; i < demand_points.size(); ++i) {
    demand_points[i].reachable_stations = std::move(cov.reachable[i]);
  }
  options.max_travel_minutes = max_travel_minutes;
  InstanceData data;
  data.demand_points = std::move(demand_points);
  data.stations = std::move(stations);
  data.charger_types = std::move(charger_types);
  data.travel_time = std::move(cov.travel_time);
  data.costs = costs;
  data.options = options;
  return Instance(std::move(data));
}

namespace {

struct Planar {
  double x;
  double y;
};

double sq_dist(const Planar& a, const Planar& b) {
  return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}

std::vector<Planar> project(const std::vector<GeoPoint>& points) {
  std::vector<double> lats;
  for (const auto& p : points) lats.push_back(p.lat);
  std::nth_element(lats.begin(), lats.begin() + lats.size() / 2, lats.end());
  const double scale = std::cos(radians(lats[lats.size() / 2]));
  std::vector<Planar> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back({kEarthRadiusKm * radians(p.lon) * scale, kEarthRadiusKm * radians(p.lat)});
  }
  return out;
}

// Index drawn with probability proportional to w; the last positive entry if
// rounding leaves the draw unresolved.
std::size_t weighted_pick(const std::vector<double>& w, std::mt19937_64& rng) {
  double total = 0.0;
  for (double v : w) total += v;
  std::uniform_real_distribution<double> u(0.0, total);
  double r = u(rng);
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (r < w[i]) return i;
    r -= w[i];
  }
  return last;
}

struct KMeansRun {
  std::vector<int> labels;
  double inertia = 0.0;
};

KMeansRun lloyd(const std::vector<Planar>& pts, const std::vector<double>& w, int k,
                std::mt19937_64& rng) {
  const auto n = pts.size();
  std::vector<Planar> centers;
  centers.push_back(pts[weighted_pick(w, rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(pts[i], c));
      d2[i] = w[i] * best;
    }
    if (std::all_of(d2.begin(), d2.end(), [](double v) { return v <= 0.0; })) {
      // Remaining points coincide with chosen centers; take any unused one.
      for (std::size_t i = 0; i < n; ++i) d2[i] = 1.0;
    }
    centers.push_back(pts[weighted_pick(d2, rng)]);
  }

  KMeansRun run;
  run.labels.assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(pts[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(pts[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }
    std::vector<double> sx(k, 0.0), sy(k, 0.0), sw(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sx[run.labels[i]] += w[i] * pts[i].x;
      sy[run.labels[i]] += w[i] * pts[i].y;
      sw[run.labels[i]] += w[i];
    }
    for (int c = 0; c < k; ++c) {
      if (sw[c] > 0.0) {
        centers[c] = {sx[c] / sw[c], sy[c] / sw[c]};
        continue;
      }
      // Empty cluster: move it onto the point worst served by its center.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_dist(pts[i], centers[run.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[c] = pts[far];
      run.labels[far] = c;
      changed = true;
    }
    if (!changed) break;
  }
  for (std::size_t i = 0; i < n; ++i) run.inertia += w[i] * sq_dist(pts[i], centers[run.labels[i]]);
  return run;
}

// Relabel clusters by first member so output order follows input order.
std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, _] = remap.emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

// Splits k across groups: one cluster each, then highest size-per-cluster
// first (ties to the earlier group), never more clusters than members.
std::vector<int> allocate(const std::vector<std::size_t>& sizes, int k) {
  std::vector<int> alloc(sizes.size(), 1);
  int used = static_cast<int>(sizes.size());
  while (used < k) {
    int pick = -1;
    double best = -1.0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (alloc[g] >= static_cast<int>(sizes[g])) continue;
      const double q = static_cast<double>(sizes[g]) / alloc[g];
      if (q > best) {
        best = q;
        pick = static_cast<int>(g);
      }
    }
    ++alloc[pick];
    ++used;
  }
  return alloc;
}

// Stratified clustering: labels are global cluster ids ordered by the first
// member's position.
std::vector<int> grouped_labels(const std::vector<GeoPoint>& pts, const std::vector<double>& w,
                                const std::vector<std::string>& group_keys, int k,
                                std::uint64_t seed, const char* what) {
  const int n = static_cast<int>(pts.size());
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidK, std::string(what) + ": k=" + std::to_string(k) +
                                         " must lie in [1, " + std::to_string(n) + "]");
  }
  std::vector<std::string> keys;
  std::vector<std::vector<int>> members;
  for (int i = 0; i < n; ++i) {
    auto it = std::find(keys.begin(), keys.end(), group_keys[i]);
    if (it == keys.end()) {
      keys.push_back(group_keys[i]);
      members.emplace_back();
      it = keys.end() - 1;
    }
    members[it - keys.begin()].push_back(i);
  }
  if (k < static_cast<int>(keys.size())) {
    throw Error(ErrorCode::InvalidK, std::string(what) + ": k=" + std::to_string(k) +
                                         " is below the " + std::to_string(keys.size()) +
                                         " groups that may not be merged");
  }
  std::vector<std::size_t> sizes;
  for (const auto& m : members) sizes.push_back(m.size());
  const auto alloc = allocate(sizes, k);

  std::vector<int> labels(n, -1);
  int offset = 0;
  for (std::size_t g = 0; g < members.size(); ++g) {
    std::vector<GeoPoint> gp;
    std::vector<double> gw;
    for (int i : members[g]) {
      gp.push_back(pts[i]);
      gw.push_back(w[i]);
    }
    const auto local = kmeans_labels(gp, gw, alloc[g], seed + g);
    for (std::size_t t = 0; t < members[g].size(); ++t) labels[members[g][t]] = offset + local[t];
    offset += alloc[g];
  }
  return canonical(labels);
}

}  // namespace

std::vector<int> kmeans_labels(const std::vector<GeoPoint>& points,
                               const std::vector<double>& weights, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidK, "k must lie in [1, number of points]");
  if (k == n) {
    std::vector<int> id(n);
    for (int i = 0; i < n; ++i) id[i] = i;
    return id;
  }
  const auto pts = project(points);
  std::mt19937_64 rng(seed);
  KMeansRun best;
  best.inertia = std::numeric_limits<double>::infinity();
  constexpr int kRestarts = 10;
  for (int r = 0; r < kRestarts; ++r) {
    auto run = lloyd(pts, weights, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return canonical(best.labels);
}

std::vector<DemandPoint> cluster_demands(const std::vector<DemandPoint>& points, int k,
                                         std::uint64_t seed) {
  std::vector<GeoPoint> loc;
  std::vector<double> w;
  std::vector<std::string> keys;
  for (const auto& p : points) {
    loc.push_back(p.location);
    w.push_back(p.rate);
    keys.push_back(p.agency);
  }
  const auto labels = grouped_labels(loc, w, keys, k, seed, "demand clustering");

  std::vector<DemandPoint> out(k);
  std::vector<int> size(k, 0);
  std::vector<double> lat(k, 0.0), lon(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = labels[i];
    if (size[c]++ == 0) {
      out[c].id = points[i].id;
      out[c].agency = points[i].agency;
    }
    out[c].rate += points[i].rate;
    lat[c] += points[i].rate * points[i].location.lat;
    lon[c] += points[i].rate * points[i].location.lon;
  }
  for (int c = 0; c < k; ++c) {
    out[c].location = {lat[c] / out[c].rate, lon[c] / out[c].rate};
    if (size[c] > 1) out[c].id = "cluster-d" + std::to_string(c);
  }
  // Preserve exact coordinates of singleton clusters.
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (size[labels[i]] == 1) out[labels[i]].location = points[i].location;
  }
  return out;
}

std::vector<CandidateStation> cluster_stations(const std::vector<CandidateStation>& stations,
                                               int k, std::uint64_t seed) {
  std::vector<GeoPoint> loc;
  std::vector<double> w(stations.size(), 1.0);
  std::vector<std::string> keys;
  for (const auto& s : stations) {
    loc.push_back(s.location);
    keys.push_back((s.is_garage ? "g:" : "o:") + s.agency);
  }
  const auto labels = grouped_labels(loc, w, keys, k, seed, "station clustering");

  std::vector<CandidateStation> out(k);
  std::vector<int> size(k, 0);
  std::vector<double> lat(k, 0.0), lon(k, 0.0);
  for (std::size_t j = 0; j < stations.size(); ++j) {
    const auto& s = stations[j];
    auto& c = out[labels[j]];
    if (size[labels[j]]++ == 0) {
      c.id = s.id;
      c.agency = s.agency;
      c.is_garage = s.is_garage;
      c.fixed_cost_rate = s.fixed_cost_rate;
      c.max_chargers = s.max_chargers;
    } else {
      c.fixed_cost_rate = std::min(c.fixed_cost_rate, s.fixed_cost_rate);
      for (std::size_t t = 0; t < c.max_chargers.size() && t < s.max_chargers.size(); ++t) {
        c.max_chargers[t] = std::max(c.max_chargers[t], s.max_chargers[t]);
      }
    }
    lat[labels[j]] += s.location.lat;
    lon[labels[j]] += s.location.lon;
  }
  for (int c = 0; c < k; ++c) {
    if (size[c] > 1) {
      out[c].id = "cluster-s" + std::to_string(c);
      out[c].location = {lat[c] / size[c], lon[c] / size[c]};
    }
  }
  for (std::size_t j = 0; j < stations.size(); ++j) {
    if (size[labels[j]] == 1) out[labels[j]].location = stations[j].location;
  }
  return out;
}

Instance cluster_instance(const Instance& instance, int k_demand, int k_station,
                          std::uint64_t seed) {
  if (k_demand == instance.num_demands() && k_station == instance.num_stations()) {
    if (k_demand < 1 || k_station < 1) throw Error(ErrorCode::InvalidK, "k must be >= 1");
    return instance;
  }
  const auto& data = instance.data();
  double cutoff = 0.0;
  if (data.options.max_travel_minutes) {
    cutoff = *data.options.max_travel_minutes;
  } else {
    for (const auto& row : data.travel_time) {
      for (double t : row) {
        if (std::isfinite(t)) cutoff = std::max(cutoff, t);
      }
    }
    if (cutoff <= 0.0) cutoff = 1.0;
  }
  auto demands = cluster_demands(data.demand_points, k_demand, seed);
  auto stations = cluster_stations(data.stations, k_station, seed);
  auto out = make_instance(std::move(demands), std::move(stations), data.charger_types,
                           data.costs, data.options, cutoff);
  if (data.battery) {
    auto d = out.data();
    d.battery = data.battery;
    return Instance(std::move(d));
  }
  return out;
}

}  // namespace placebeb::demand
