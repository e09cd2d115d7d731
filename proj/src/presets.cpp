#include "placebeb/presets.hpp"

namespace placebeb::presets {

std::vector<ChargerType> Baseline::charger_types() const {
  std::vector<ChargerType> out;
  for (std::size_t k = 0; k < chargers.size(); ++k) {
    ChargerType t;
    t.id = static_cast<int>(k);
    t.name = chargers[k].name;
    t.power_kw = chargers[k].power_kw;
    t.unit_cost_rate = per_minute_rate(chargers[k].capital_usd, chargers[k].lifetime_years);
    out.push_back(t);
  }
  return derive_service_rates(battery.capacity_kwh, battery.soc_start_pct, battery.soc_end_pct,
                              std::move(out));
}

Baseline transit_baseline() {
  Baseline b;
  b.chargers = {{"slow", 125.0, 55500.0, 10.0}, {"fast", 450.0, 200000.0, 10.0}};
  b.station_capital_usd = 208000.0;
  b.station_lifetime_years = 30.0;
  b.battery = {440.0, 10.0, 80.0};
  b.costs = {2.67, 3.46};
  return b;
}

double size_scaled_time_limit(int size) {
  if (size < 10) return 30.0;
  if (size < 20) return 60.0;
  if (size < 50) return 120.0;
  if (size < 60) return 300.0;
  return 420.0;
}

}  // namespace placebeb::presets
