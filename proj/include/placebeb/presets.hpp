#pragma once

#include <string>
#include <vector>

#include "placebeb/model.hpp"

namespace placebeb::presets {

struct ChargerSpec {
  std::string name;
  double power_kw = 0.0;
  double capital_usd = 0.0;
  double lifetime_years = 0.0;
};

struct Baseline {
  std::vector<ChargerSpec> chargers;
  double station_capital_usd = 0.0;
  double station_lifetime_years = 0.0;
  BatterySpec battery;
  CostRates costs;

  double station_cost_rate() const { return per_minute_rate(station_capital_usd, station_lifetime_years); }
  // Charger types with per-minute cost rates and service rates derived from
  // the battery and state-of-charge window.
  std::vector<ChargerType> charger_types() const;
};

// Baseline case-study parameters: 125 and 450 kW chargers, 440 kWh battery
// charged from 10 to 80 percent, 2.67 and 3.46 $/min travel and wait costs.
Baseline transit_baseline();

// Solver time limit in seconds by problem size |I| + |J|:
// <10: 30, <20: 60, <50: 120, <60: 300, otherwise 420.
double size_scaled_time_limit(int size);

}  // namespace placebeb::presets
