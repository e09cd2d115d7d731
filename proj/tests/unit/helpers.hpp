#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "placebeb/model.hpp"

namespace testing {

// Small hand-built instances. Stations and charger types are indexed in the
// order they are added; travel is given per reachable station.
class InstanceBuilder {
 public:
  InstanceBuilder& costs(double travel, double wait) {
    data_.costs = {travel, wait};
    return *this;
  }
  InstanceBuilder& type(double service_rate, double unit_cost, double power_kw = 100.0) {
    placebeb::ChargerType k;
    k.id = static_cast<int>(data_.charger_types.size());
    k.name = "k" + std::to_string(k.id);
    k.power_kw = power_kw;
    k.unit_cost_rate = unit_cost;
    k.service_rate = service_rate;
    k.recharge_time = 1.0 / service_rate;
    data_.charger_types.push_back(k);
    return *this;
  }
  InstanceBuilder& station(double fixed_cost, int cap = 10, bool garage = false,
                           std::string agency = "") {
    placebeb::CandidateStation s;
    s.id = "S" + std::to_string(data_.stations.size());
    s.fixed_cost_rate = fixed_cost;
    s.is_garage = garage;
    s.agency = std::move(agency);
    caps_.push_back(cap);
    data_.stations.push_back(std::move(s));
    return *this;
  }
  InstanceBuilder& demand(double rate, std::vector<std::pair<int, double>> reach,
                          std::string agency = "") {
    placebeb::DemandPoint p;
    p.id = "D" + std::to_string(data_.demand_points.size());
    p.rate = rate;
    p.agency = std::move(agency);
    reach_.push_back(std::move(reach));
    data_.demand_points.push_back(std::move(p));
    return *this;
  }
  InstanceBuilder& epsilon(double e) {
    data_.options.epsilon = e;
    return *this;
  }
  InstanceBuilder& proximity(bool on) {
    data_.options.enforce_proximity = on;
    return *this;
  }

  placebeb::InstanceData data() const {
    auto d = data_;
    for (std::size_t j = 0; j < d.stations.size(); ++j) {
      d.stations[j].max_chargers.assign(d.charger_types.size(), caps_[j]);
    }
    d.travel_time.assign(d.demand_points.size(),
                         std::vector<double>(d.stations.size(),
                                             std::numeric_limits<double>::infinity()));
    for (std::size_t i = 0; i < d.demand_points.size(); ++i) {
      for (auto [j, t] : reach_[i]) {
        d.demand_points[i].reachable_stations.push_back(j);
        d.travel_time[i][j] = t;
      }
    }
    return d;
  }
  placebeb::Instance build() const { return placebeb::Instance(data()); }

 private:
  placebeb::InstanceData data_;
  std::vector<int> caps_;
  std::vector<std::vector<std::pair<int, double>>> reach_;
};

// The 1 demand, 1 station, 1 type example: lambda 0.5, mu 1, travel 2,
// unit travel and wait rates, station 5, charger 1.
inline placebeb::Instance one_by_one() {
  return InstanceBuilder().costs(1, 1).type(1.0, 1.0).station(5.0).demand(0.5, {{0, 2.0}}).build();
}

}  // namespace testing
