#include "placebeb/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "placebeb/error.hpp"
#include "placebeb/queueing.hpp"

namespace placebeb {

std::vector<int> admissible_stations(const Instance& instance) {
  std::vector<int> out;
  for (int j = 0; j < instance.num_stations(); ++j) {
    const auto& st = instance.station(j);
    if (st.served_demands.empty()) continue;
    double capacity = 0.0;
    for (int k = 0; k < instance.num_charger_types(); ++k) {
      capacity += instance.charger(k).service_rate * st.max_chargers[k];
    }
    double load = 0.0;
    for (int i : st.served_demands) load += instance.demand(i).rate;
    if (capacity > load) out.push_back(j);
  }
  return out;
}

bool covers_all(const Instance& instance, const std::vector<int>& active) {
  std::vector<char> on(instance.num_stations(), 0);
  for (int j : active) on[j] = 1;
  for (const auto& d : instance.demand_points()) {
    if (std::none_of(d.reachable_stations.begin(), d.reachable_stations.end(),
                     [&](int j) { return on[j] != 0; })) {
      return false;
    }
  }
  return true;
}

namespace {

[[noreturn]] void throw_uncoverable(const Instance& instance, const std::vector<char>& covered) {
  std::vector<std::string> ids;
  std::string list;
  for (int i = 0; i < instance.num_demands(); ++i) {
    if (covered[i]) continue;
    ids.push_back(instance.demand(i).id);
    list += (list.empty() ? "" : ", ") + ids.back();
  }
  throw Error(ErrorCode::Infeasible, "no admissible station covers: " + list, ids);
}

}  // namespace

std::vector<int> min_stations(const Instance& instance) {
  const auto candidates = admissible_stations(instance);
  std::vector<char> covered(instance.num_demands(), 0);
  std::vector<char> used(instance.num_stations(), 0);
  int remaining = instance.num_demands();
  std::vector<int> chosen;
  while (remaining > 0) {
    int best = -1;
    int best_count = 0;
    for (int j : candidates) {
      if (used[j]) continue;
      int count = 0;
      for (int i : instance.station(j).served_demands) count += covered[i] ? 0 : 1;
      if (count == 0) continue;
      const bool better =
          best < 0 || count > best_count ||
          (count == best_count &&
           instance.station(j).fixed_cost_rate < instance.station(best).fixed_cost_rate);
      if (better) {
        best = j;
        best_count = count;
      }
    }
    if (best < 0) throw_uncoverable(instance, covered);
    used[best] = 1;
    chosen.push_back(best);
    for (int i : instance.station(best).served_demands) {
      if (!covered[i]) {
        covered[i] = 1;
        --remaining;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

// Depth-first search over orderings of station activations. Each distinct set
// is expanded again only if the size bound has dropped since its last visit,
// which keeps the walk polynomial in the number of sets of size <= S + 1.
class CoverSearch {
 public:
  CoverSearch(const Instance& instance, int population)
      : instance_(instance),
        population_(population),
        stations_(admissible_stations(instance)),
        best_size_(static_cast<int>(stations_.size()) + 1) {}

  std::vector<std::vector<int>> run() {
    std::vector<int> active;
    cover_.assign(instance_.num_demands(), 0);
    std::vector<char> on(instance_.num_stations(), 0);
    uncovered_ = instance_.num_demands();
    expand(active, on);
    return found_;
  }

 private:
  void activate(int j, int delta) {
    for (int i : instance_.station(j).served_demands) {
      if (delta > 0 && cover_[i]++ == 0) --uncovered_;
      if (delta < 0 && --cover_[i] == 0) ++uncovered_;
    }
  }

  void expand(std::vector<int>& active, std::vector<char>& on) {
    if (visits_ >= kVisitBudget) return;
    ++visits_;
    const int size = static_cast<int>(active.size());
    if (uncovered_ == 0) {
      std::vector<int> set = active;
      std::sort(set.begin(), set.end());
      if (size < best_size_) {
        best_size_ = size;
        found_.clear();
        insert(std::move(set));
      } else if ((size == best_size_ || size == best_size_ + 1) && !full()) {
        insert(std::move(set));
      }
      return;
    }
    // Once the collection is full only a strictly smaller cover matters.
    if (size >= (full() ? best_size_ - 1 : best_size_ + 1)) return;

    std::vector<int> key = active;
    std::sort(key.begin(), key.end());
    auto [it, fresh] = seen_.emplace(std::move(key), best_size_);
    if (!fresh) {
      if (it->second <= best_size_ || full()) return;
      it->second = best_size_;
    }

    for (int j : stations_) {
      if (on[j]) continue;
      on[j] = 1;
      active.push_back(j);
      activate(j, +1);
      expand(active, on);
      activate(j, -1);
      active.pop_back();
      on[j] = 0;
    }
  }

  bool full() const { return static_cast<int>(found_.size()) >= population_; }

  void insert(std::vector<int> set) {
    if (std::find(found_.begin(), found_.end(), set) != found_.end()) return;
    found_.push_back(std::move(set));
  }

  static constexpr long kVisitBudget = 2'000'000;

  const Instance& instance_;
  int population_;
  std::vector<int> stations_;
  int best_size_;
  std::vector<int> cover_;
  int uncovered_ = 0;
  long visits_ = 0;
  std::map<std::vector<int>, int> seen_;
  std::vector<std::vector<int>> found_;
};

}  // namespace

std::vector<std::vector<int>> cover_sets(const Instance& instance, int population) {
  if (population < 1) throw Error(ErrorCode::InvalidArgument, "population must be >= 1");
  // Surfaces Infeasible with the uncovered ids before searching.
  min_stations(instance);
  auto sets = CoverSearch(instance, population).run();
  if (sets.empty()) throw Error(ErrorCode::Infeasible, "no station cover found");
  return sets;
}

std::vector<Assignment> demand_assignment(const Instance& instance,
                                          const std::vector<int>& active, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "assignment randomness must lie in [0, 1]");
  }
  std::vector<char> on(instance.num_stations(), 0);
  for (int j : active) on[j] = 1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> type(0, instance.num_charger_types() - 1);

  std::vector<Assignment> out;
  out.reserve(instance.num_demands());
  std::vector<int> options;
  for (int i = 0; i < instance.num_demands(); ++i) {
    options.clear();
    for (int j : instance.demand(i).reachable_stations) {
      if (on[j]) options.push_back(j);
    }
    if (options.empty()) {
      throw Error(ErrorCode::Uncovered,
                  "demand " + instance.demand(i).id + " has no reachable active station",
                  {instance.demand(i).id});
    }
    const double r = unit(rng);
    int station = options.front();
    if (r < p) {
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      station = options[pick(rng)];
    } else {
      for (int j : options) {
        if (instance.travel_time(i, j) < instance.travel_time(i, station)) station = j;
      }
    }
    out.push_back({i, station, type(rng)});
  }
  return out;
}

int min_servers(double load, double service_rate, double epsilon) {
  if (load <= 0.0) return 0;
  const double per_server = service_rate * (1.0 - epsilon);
  int s = static_cast<int>(std::ceil(load / per_server));
  s = std::max(s, 1);
  while (service_rate * s * (1.0 - epsilon) < load) ++s;
  while (s > 1 && service_rate * (s - 1) * (1.0 - epsilon) >= load) --s;
  return s;
}

double group_cost(double load, double service_rate, int servers, double unit_cost,
                  double wait_weight) {
  double cost = unit_cost * servers;
  if (load > 0.0) cost += load * wait_weight * queueing::expected_wait({load, service_rate, servers});
  return cost;
}

std::optional<int> size_group(double load, double service_rate, double epsilon, int cap,
                              double unit_cost, double wait_weight) {
  if (load <= 0.0) return 0;
  int s = min_servers(load, service_rate, epsilon);
  if (s > cap) return std::nullopt;
  double current = group_cost(load, service_rate, s, unit_cost, wait_weight);
  while (s + 1 <= cap) {
    const double next = group_cost(load, service_rate, s + 1, unit_cost, wait_weight);
    if (!(next < current)) break;
    ++s;
    current = next;
  }
  return s;
}

std::optional<std::vector<std::vector<int>>> try_best_chargers(
    const Instance& instance, const std::vector<Assignment>& assignments,
    IncrementWeight weight) {
  const auto loads = station_loads(instance, assignments);
  const double w = weight == IncrementWeight::Wait ? instance.costs().wait : instance.costs().travel;
  std::vector<std::vector<int>> s(instance.num_stations(),
                                  std::vector<int>(instance.num_charger_types(), 0));
  for (int j = 0; j < instance.num_stations(); ++j) {
    for (int k = 0; k < instance.num_charger_types(); ++k) {
      if (loads[j][k] <= 0.0) continue;
      const auto& type = instance.charger(k);
      auto count = size_group(loads[j][k], type.service_rate, instance.epsilon(),
                              instance.max_chargers(j, k), type.unit_cost_rate, w);
      if (!count) return std::nullopt;
      s[j][k] = *count;
    }
  }
  return s;
}

std::vector<std::vector<int>> best_chargers(const Instance& instance,
                                            const std::vector<Assignment>& assignments,
                                            IncrementWeight weight) {
  auto s = try_best_chargers(instance, assignments, weight);
  if (!s) {
    throw Error(ErrorCode::Infeasible,
                "assigned load exceeds charger capacity at some station and type");
  }
  return std::move(*s);
}

std::optional<Solution> solve_assignment(const Instance& instance,
                                         std::vector<Assignment> assignments,
                                         IncrementWeight weight) {
  auto s = try_best_chargers(instance, assignments, weight);
  if (!s) return std::nullopt;
  return complete_solution(instance, std::move(assignments), std::move(*s));
}

}  // namespace placebeb
