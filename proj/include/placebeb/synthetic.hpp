#pragma once

#include <cstdint>

#include "placebeb/model.hpp"

namespace placebeb::synthetic {

enum class Profile {
  // Unit travel/wait rates, rates and costs of order one; fast to solve.
  Abstract,
  // Baseline case-study charger, station and cost parameters.
  Transit,
};

struct Spec {
  int demands = 5;
  int stations = 4;
  int charger_types = 2;  // Transit profile: at most 2
  Profile profile = Profile::Abstract;
  // Demands and stations alternate between agencies "A", "B", ...
  int agencies = 1;
  double garage_fraction = 0.25;
  double area_km = 10.0;
  double speed_kmh = 30.0;
  // Demands reach every station within this time, and always the nearest.
  double max_travel_minutes = 15.0;
  int max_chargers = 10;
  bool enforce_proximity = false;
};

// Points uniform in an area_km square. Deterministic for a given seed.
Instance random_instance(const Spec& spec, std::uint64_t seed);

}  // namespace placebeb::synthetic
