#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "placebeb/demand.hpp"
#include "placebeb/error.hpp"
#include "placebeb/io.hpp"

using namespace placebeb;
using namespace placebeb::demand;
using doctest::Approx;

namespace {

const std::string kData = PLACEBEB_TEST_DATA;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

Trip trip(std::string from, std::string to, double start, double end,
          TripKind kind = TripKind::Service) {
  Trip t;
  t.id = from + "-" + to;
  t.origin = {from, {41.0, -87.0}};
  t.destination = {to, {41.0, -87.0}};
  t.start = start;
  t.end = end;
  t.kind = kind;
  return t;
}

BlockSchedule block(std::vector<Trip> trips) {
  BlockSchedule b;
  b.id = "B";
  b.garage_id = "G";
  b.trips = std::move(trips);
  return b;
}

}  // namespace

TEST_CASE("segment the single-block example") {
  const auto blocks = io::read_blocks_csv(kData + "/single_block.csv");
  REQUIRE(blocks.size() == 1);
  const auto events = segment_block(blocks[0], 360.0);
  REQUIRE(events.size() == 2);
  // Third revenue trip E->F ends at 16:00.
  CHECK(events[0].stop_id == "F");
  CHECK(events[0].time == 960.0);
  CHECK(events[1].stop_id == "J");
  CHECK(std::abs(events[1].time - 1440.0) <= 15.0);
}

TEST_CASE("segment_block examples") {
  const double range = 100.0;
  CHECK(segment_block(block({trip("G", "A", 0, 10, TripKind::Deadhead), trip("A", "B", 10, 50),
                             trip("B", "G", 50, 60, TripKind::Deadhead)}),
                      range)
            .empty());

  const auto two = segment_block(block({trip("G", "A", 0, 60), trip("A", "G", 60, 120)}), range);
  REQUIRE(two.size() == 1);
  CHECK(two[0].stop_id == "A");
  CHECK(two[0].time == 60.0);

  CHECK(code_of([&] { segment_block(block({trip("G", "G", 0, 150)}), range); }) ==
        ErrorCode::RangeTooShort);
}

TEST_CASE("layovers consume no range") {
  const auto b = block({trip("G", "A", 0, 50), trip("A", "A", 50, 500, TripKind::Layover),
                        trip("A", "G", 500, 540)});
  CHECK(segment_block(b, 100.0).empty());
}

TEST_CASE("validate_block rejects malformed blocks") {
  CHECK(code_of([] { validate_block(block({})); }) == ErrorCode::InvalidBlock);
  CHECK(code_of([] { validate_block(block({trip("G", "A", 10, 5), trip("A", "G", 20, 30)})); }) ==
        ErrorCode::InvalidBlock);
  CHECK(code_of([] { validate_block(block({trip("G", "A", 0, 30), trip("A", "G", 20, 40)})); }) ==
        ErrorCode::InvalidBlock);
  CHECK(code_of([] { validate_block(block({trip("X", "A", 0, 30), trip("A", "G", 40, 50)})); }) ==
        ErrorCode::InvalidBlock);
  CHECK(code_of([] { validate_block(block({trip("G", "A", 0, 30), trip("A", "Y", 40, 50)})); }) ==
        ErrorCode::InvalidBlock);
  CHECK(code_of([] { validate_block(block({trip("G", "G", 0, 0)})); }) == ErrorCode::InvalidBlock);
}

TEST_CASE("events are ordered and respect the range") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dur(1.0, 80.0), gap(0.0, 30.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<Trip> trips;
    double t = 0.0;
    std::string here = "G";
    const int legs = 2 + static_cast<int>(rng() % 20);
    for (int l = 0; l < legs; ++l) {
      const std::string next = l + 1 == legs ? "G" : "T" + std::to_string(rng() % 6);
      const double d = dur(rng);
      const auto kind = (l > 0 && l + 1 < legs && rng() % 5 == 0) ? TripKind::Layover : TripKind::Service;
      trips.push_back(trip(here, kind == TripKind::Layover ? here : next, t, t + d, kind));
      if (kind != TripKind::Layover) here = next;
      t += d + gap(rng);
    }
    if (trips.back().destination.id != "G") trips.back().destination.id = "G";
    const auto b = block(trips);
    const double range = 90.0;
    const auto events = segment_block(b, range);
    for (std::size_t e = 1; e < events.size(); ++e) CHECK(events[e].time > events[e - 1].time);

    // Driving time between consecutive charges (and after the last one).
    std::vector<double> cut_times;
    for (const auto& e : events) cut_times.push_back(e.time);
    cut_times.push_back(std::numeric_limits<double>::infinity());
    double used = 0.0;
    std::size_t next = 0;
    for (const auto& tr : b.trips) {
      if (tr.start >= cut_times[next]) {
        CHECK(used <= range + 1e-9);
        used = 0.0;
        ++next;
      }
      used += tr.driving_minutes();
    }
    CHECK(used <= range + 1e-9);
    CHECK(next == events.size());
  }
}

TEST_CASE("ten-block file matches the independent count") {
  const auto expected = io::read_json(kData + "/blocks10_expected.json");
  const double range = expected.at("range_minutes").get<double>();
  std::size_t total = 0;
  for (const auto& b : io::read_blocks_csv(kData + "/blocks10.csv")) {
    const auto events = segment_block(b, range);
    const auto& want = expected.at("events").at(b.id);
    REQUIRE(events.size() == want.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      CHECK(events[e].stop_id == want[e].at("stop").get<std::string>());
      CHECK(events[e].time == want[e].at("time").get<double>());
    }
    total += events.size();
  }
  CHECK(total == expected.at("total_events").get<std::size_t>());
}

TEST_CASE("aggregate_demand examples") {
  std::vector<DemandEvent> ev;
  for (int n = 0; n < 3; ++n) ev.push_back({"B", "A", 100.0 * n, {1, 2}, ""});
  auto pts = aggregate_demand(ev, 1440.0);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].rate == Approx(3.0 / 1440.0).epsilon(1e-15));
  CHECK(pts[0].rate == Approx(0.002083).epsilon(1e-3));

  CHECK(aggregate_demand({}, 1440.0).empty());

  ev.clear();
  for (int n = 0; n < 10; ++n) ev.push_back({"B", "X", 1.0 * n, {0, 0}, ""});
  for (int n = 0; n < 5; ++n) ev.push_back({"B", "Y", 1.0 * n, {0, 1}, ""});
  pts = aggregate_demand(ev, 1440.0);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].rate == Approx(0.006944).epsilon(1e-4));
  CHECK(pts[1].rate == Approx(0.003472).epsilon(1e-4));
}

TEST_CASE("haversine distance") {
  const double one_degree = 6371.0 * std::numbers::pi / 180.0;
  CHECK(haversine_km({0, 0}, {1, 0}) == Approx(one_degree).epsilon(1e-12));
  CHECK(haversine_km({0, 0}, {0, 1}) == Approx(one_degree).epsilon(1e-12));
  CHECK(haversine_km({41.9, -87.6}, {41.9, -87.6}) == 0.0);
  CHECK(travel_minutes({0, 0}, {1, 0}, 30.0) == Approx(one_degree / 30.0 * 60.0));
}

TEST_CASE("build_coverage examples") {
  const double lat_per_km = 1.0 / (6371.0 * std::numbers::pi / 180.0);
  std::vector<DemandPoint> pts(2);
  pts[0].id = "near";
  pts[0].location = {41.0, -87.0};
  pts[0].rate = 0.1;
  pts[1].id = "far";
  pts[1].location = {41.0 + 10.0 * lat_per_km, -87.0};
  pts[1].rate = 0.1;
  std::vector<CandidateStation> st(1);
  st[0].id = "S";
  st[0].location = {41.0, -87.0};

  try {
    build_coverage(pts, st, 15.0, 30.0);
    FAIL("expected InfeasibleDemand");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleDemand);
    REQUIRE(e.details().size() == 1);
    CHECK(e.details()[0] == "far");
  }

  const auto cov = build_coverage(pts, st, 25.0, 30.0);
  CHECK(cov.travel_time[0][0] == 0.0);
  CHECK(cov.reachable[0] == std::vector<int>{0});
  CHECK(cov.travel_time[1][0] == Approx(20.0).epsilon(1e-9));
}

TEST_CASE("coverage is an exact inverse image") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<DemandPoint> pts(30);
  std::vector<CandidateStation> st(12);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].id = "d" + std::to_string(i);
    pts[i].location = {41.9 + u(rng), -87.6 + u(rng)};
    pts[i].rate = 0.01;
  }
  for (std::size_t j = 0; j < st.size(); ++j) {
    st[j].id = "s" + std::to_string(j);
    st[j].location = {41.9 + u(rng), -87.6 + u(rng)};
  }
  const auto cov = build_coverage(pts, st, 1000.0, 30.0);
  const auto tight = build_coverage(pts, st, 12.0, 30.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(cov.reachable[i].size() == st.size());
    for (std::size_t j = 0; j < st.size(); ++j) {
      const bool r = std::count(tight.reachable[i].begin(), tight.reachable[i].end(), j) == 1;
      const bool s = std::count(tight.served[j].begin(), tight.served[j].end(), i) == 1;
      CHECK(r == s);
      CHECK(r == (tight.travel_time[i][j] <= 12.0));
    }
  }
}

TEST_CASE("clustering examples") {
  std::vector<DemandPoint> pts(4);
  const double d = 0.01;
  const GeoPoint corners[] = {{0, 0}, {0, d}, {d, 0}, {d, d}};
  for (int n = 0; n < 4; ++n) {
    pts[n].id = "p" + std::to_string(n);
    pts[n].location = corners[n];
    pts[n].rate = 0.25 * (n + 1);
  }

  const auto same = cluster_demands(pts, 4, 1);
  REQUIRE(same.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(same[n].rate == pts[n].rate);
    CHECK(same[n].id == pts[n].id);
  }

  const auto one = cluster_demands(pts, 1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].rate == Approx(2.5).epsilon(1e-12));

  for (auto& p : pts) p.rate = 1.0;
  const auto halves = cluster_demands(pts, 2, 42);
  REQUIRE(halves.size() == 2);
  for (const auto& c : halves) {
    CHECK(c.rate == 2.0);
    const bool lat_mid = std::abs(c.location.lat - d / 2) < 1e-12 &&
                         (std::abs(c.location.lon) < 1e-12 || std::abs(c.location.lon - d) < 1e-12);
    const bool lon_mid = std::abs(c.location.lon - d / 2) < 1e-12 &&
                         (std::abs(c.location.lat) < 1e-12 || std::abs(c.location.lat - d) < 1e-12);
    CHECK((lat_mid || lon_mid));
  }
}

TEST_CASE("clustering conserves rate and is seed-deterministic") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 0.2), r(0.001, 0.05);
  std::vector<DemandPoint> pts(60);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].id = "p" + std::to_string(i);
    pts[i].location = {41.8 + u(rng), -87.7 + u(rng)};
    pts[i].rate = r(rng);
    pts[i].agency = i % 3 == 0 ? "B" : "A";
  }
  const double total = std::accumulate(pts.begin(), pts.end(), 0.0,
                                       [](double s, const DemandPoint& p) { return s + p.rate; });
  for (int k : {2, 5, 17, 59}) {
    const auto c = cluster_demands(pts, k, 9);
    CHECK(static_cast<int>(c.size()) == k);
    const double sum = std::accumulate(c.begin(), c.end(), 0.0,
                                       [](double s, const DemandPoint& p) { return s + p.rate; });
    CHECK(std::abs(sum - total) <= 1e-12);
    const auto again = cluster_demands(pts, k, 9);
    for (int n = 0; n < k; ++n) {
      CHECK(again[n].rate == c[n].rate);
      CHECK(again[n].location.lat == c[n].location.lat);
    }
  }
  CHECK(code_of([&] { cluster_demands(pts, 1, 0); }) == ErrorCode::InvalidK);
  CHECK(code_of([&] { cluster_demands(pts, 61, 0); }) == ErrorCode::InvalidK);
}
