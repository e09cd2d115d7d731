#include "placebeb/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "placebeb/error.hpp"
#include "placebeb/queueing.hpp"

namespace placebeb {

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Optimality: return "optimality";
    case Termination::Time: return "time";
    case Termination::Gap: return "gap";
    case Termination::Iterations: return "iterations";
  }
  return "unknown";
}

WaitFloor make_cut(double service_rate, int servers, double anchor_rho) {
  if (servers <= 0) {
    throw Error(ErrorCode::UndefinedCut, "cuts are undefined without chargers");
  }
  if (!(service_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "service rate must be > 0");
  const auto tangent = queueing::tangent_cut(anchor_rho, servers, service_rate);
  const double mu_s = service_rate * servers;
  WaitFloor f;
  f.intercept = tangent.intercept / mu_s + 1.0 / service_rate;
  f.slope = tangent.slope / (mu_s * mu_s);
  f.anchor_rho = anchor_rho;
  f.servers = servers;
  f.service_rate = service_rate;
  return f;
}

WaitFloor make_cut(const Instance& instance, int station, int charger, int servers,
                   double anchor_rho) {
  if (station < 0 || station >= instance.num_stations() || charger < 0 ||
      charger >= instance.num_charger_types()) {
    throw Error(ErrorCode::InvalidArgument, "make_cut: index out of range");
  }
  return make_cut(instance.charger(charger).service_rate, servers, anchor_rho);
}

double compute_gap(double lower, double upper) {
  if (!(lower > 0.0) || !(upper > 0.0) || lower > upper) {
    throw Error(ErrorCode::InvalidBounds, "gap needs 0 < lower <= upper");
  }
  return 1.0 - lower / upper;
}

double default_big_m(const Instance& instance) {
  double max_rate = 0.0;
  for (const auto& d : instance.demand_points()) max_rate = std::max(max_rate, d.rate);
  double max_travel = 0.0;
  for (int i = 0; i < instance.num_demands(); ++i) {
    for (int j : instance.demand(i).reachable_stations) {
      max_travel = std::max(max_travel, instance.travel_time(i, j));
    }
  }
  double max_wait = 0.0;
  for (const auto& k : instance.charger_types()) {
    const double load = k.service_rate * (1.0 - instance.epsilon());
    max_wait = std::max(max_wait, queueing::expected_wait({load, k.service_rate, 1}));
  }
  return 10.0 * max_rate *
         (instance.costs().travel * max_travel + instance.costs().wait * max_wait);
}

Instance with_charger_cap(const Instance& instance, int cap) {
  if (cap < 0) throw Error(ErrorCode::InvalidArgument, "charger cap must be >= 0");
  auto data = instance.data();
  for (auto& s : data.stations) {
    for (auto& c : s.max_chargers) c = std::min(c, cap);
  }
  return Instance(std::move(data));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Costs of complete and partial assignments held as per-demand station/type
// vectors (-1 = unassigned).
class Evaluator {
 public:
  Evaluator(const Instance& instance, IncrementWeight weight)
      : inst_(instance),
        weight_(weight == IncrementWeight::Wait ? instance.costs().wait
                                                : instance.costs().travel),
        n_types_(instance.num_charger_types()),
        loads_(static_cast<std::size_t>(instance.num_stations()) * n_types_, 0.0),
        used_(instance.num_stations(), 0) {}

  // Objective of a complete assignment with greedy sizing; nullopt if some
  // group cannot be stabilised.
  std::optional<double> leaf(const std::vector<int>& station_of, const std::vector<int>& type_of) {
    accumulate(station_of, type_of);
    double cost = committed_;
    const double wait = inst_.costs().wait;
    for (int j = 0; j < inst_.num_stations(); ++j) {
      if (!used_[j]) continue;
      for (int k = 0; k < n_types_; ++k) {
        const double load = loads_[j * n_types_ + k];
        if (load <= 0.0) continue;
        const auto& type = inst_.charger(k);
        const auto s = size_group(load, type.service_rate, inst_.epsilon(),
                                  inst_.max_chargers(j, k), type.unit_cost_rate, weight_);
        if (!s) return std::nullopt;
        cost += group_cost(load, type.service_rate, *s, type.unit_cost_rate, wait);
      }
    }
    return cost;
  }

  // Station and travel cost of the assigned demands; fills loads_ and used_.
  void accumulate(const std::vector<int>& station_of, const std::vector<int>& type_of) {
    std::fill(loads_.begin(), loads_.end(), 0.0);
    std::fill(used_.begin(), used_.end(), 0);
    committed_ = 0.0;
    const double travel = inst_.costs().travel;
    for (int i = 0; i < inst_.num_demands(); ++i) {
      const int j = station_of[i];
      if (j < 0) continue;
      const double rate = inst_.demand(i).rate;
      loads_[j * n_types_ + type_of[i]] += rate;
      committed_ += rate * travel * inst_.travel_time(i, j);
      if (!used_[j]) {
        used_[j] = 1;
        committed_ += inst_.station(j).fixed_cost_rate;
      }
    }
  }

  double load(int j, int k) const { return loads_[j * n_types_ + k]; }
  bool used(int j) const { return used_[j] != 0; }
  double committed() const { return committed_; }

 private:
  const Instance& inst_;
  double weight_;
  int n_types_;
  std::vector<double> loads_;
  std::vector<char> used_;
  double committed_ = 0.0;
};

// Lower bounds for partial assignments. Cuts are pooled by (type, servers):
// the delay curve depends only on load, service rate and server count.
class Bounder {
 public:
  Bounder(const Instance& instance, BoundMode mode)
      : inst_(instance), mode_(mode), eval_(instance, IncrementWeight::Wait) {
    const auto& c = instance.costs();
    demand_floor_.resize(instance.num_demands());
    open_floor_.resize(instance.num_demands());
    for (int i = 0; i < instance.num_demands(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      double open = std::numeric_limits<double>::infinity();
      const double rate = instance.demand(i).rate;
      for (int j : instance.demand(i).reachable_stations) {
        open = std::min(open, instance.station(j).fixed_cost_rate);
        for (int k = 0; k < instance.num_charger_types(); ++k) {
          best = std::min(best, rate * (c.travel * instance.travel_time(i, j) +
                                        c.wait / instance.charger(k).service_rate));
        }
      }
      demand_floor_[i] = best;
      open_floor_[i] = open;
    }
  }

  // Adds a cut unless one already sits at this anchor. Returns whether added.
  bool add_cut(const CutRecord& r) {
    const double mu = inst_.charger(r.charger).service_rate;
    auto& pool = pool_[{r.charger, r.servers}];
    if (pool.count(r.anchor_rho)) return false;
    auto f = make_cut(mu, r.servers, r.anchor_rho);
    // Guard against finite-difference round-off lifting the line above the curve.
    f.intercept -= 1e-9 * (std::abs(f.intercept) + 1.0);
    pool.emplace(r.anchor_rho, f);
    ++version_;
    return true;
  }

  long version() const { return version_; }

  // Best available floor on the expected wait of (load, type k, s servers).
  double wait_floor(double load, int k, int s) const {
    const double mu = inst_.charger(k).service_rate;
    double floor = 1.0 / mu;
    auto it = pool_.find({k, s});
    if (it == pool_.end() || it->second.empty()) return floor;
    const auto& pool = it->second;
    const double rho = load / (mu * s);
    auto hi = pool.lower_bound(rho);
    if (hi != pool.end()) floor = std::max(floor, hi->second(load));
    if (hi != pool.begin()) floor = std::max(floor, std::prev(hi)->second(load));
    return floor;
  }

  bool has_cuts(int k, int s) const {
    auto it = pool_.find({k, s});
    return it != pool_.end() && !it->second.empty();
  }

  // Lower bound on charger plus waiting cost of one group whose load can
  // only grow.
  double group_floor(double load, int j, int k) const {
    const auto& type = inst_.charger(k);
    const int cap = inst_.max_chargers(j, k);
    const int s_min = min_servers(load, type.service_rate, inst_.epsilon());
    if (s_min > cap) return std::numeric_limits<double>::infinity();
    const double wait = inst_.costs().wait;
    if (mode_ == BoundMode::Exact) {
      const auto s = size_group(load, type.service_rate, inst_.epsilon(), cap,
                                type.unit_cost_rate, wait);
      return group_cost(load, type.service_rate, *s, type.unit_cost_rate, wait);
    }
    // Past the first server count without cuts every option costs at least
    // unit * s + load * wait / mu, which only grows with s.
    double best = std::numeric_limits<double>::infinity();
    for (int s = s_min; s <= cap; ++s) {
      best = std::min(best, type.unit_cost_rate * s + load * wait * wait_floor(load, k, s));
      if (!has_cuts(k, s)) break;
    }
    return best;
  }

  double bound(const std::vector<int>& station_of, const std::vector<int>& type_of) {
    eval_.accumulate(station_of, type_of);
    double total = eval_.committed();
    for (int j = 0; j < inst_.num_stations(); ++j) {
      if (!eval_.used(j)) continue;
      for (int k = 0; k < inst_.num_charger_types(); ++k) {
        const double load = eval_.load(j, k);
        if (load > 0.0) total += group_floor(load, j, k);
      }
    }
    // At least one new station must open if some unassigned demand reaches
    // none of the stations already in use.
    double must_open = 0.0;
    for (int i = 0; i < inst_.num_demands(); ++i) {
      if (station_of[i] >= 0) continue;
      total += demand_floor_[i];
      const auto& reach = inst_.demand(i).reachable_stations;
      if (std::none_of(reach.begin(), reach.end(), [&](int j) { return eval_.used(j); })) {
        must_open = std::max(must_open, open_floor_[i]);
      }
    }
    return total + must_open;
  }

  // Cuts at the loads of a complete assignment for every server count from
  // the stability minimum to one past the chosen size, wherever the current
  // floor is below the true wait.
  std::vector<CutRecord> leaf_cuts(const std::vector<int>& station_of,
                                   const std::vector<int>& type_of) {
    std::vector<CutRecord> added;
    eval_.accumulate(station_of, type_of);
    const double wait = inst_.costs().wait;
    for (int j = 0; j < inst_.num_stations(); ++j) {
      if (!eval_.used(j)) continue;
      for (int k = 0; k < inst_.num_charger_types(); ++k) {
        const double load = eval_.load(j, k);
        if (load <= 0.0) continue;
        const auto& type = inst_.charger(k);
        const int cap = inst_.max_chargers(j, k);
        const auto chosen = size_group(load, type.service_rate, inst_.epsilon(), cap,
                                       type.unit_cost_rate, wait);
        if (!chosen) continue;
        const int s_min = min_servers(load, type.service_rate, inst_.epsilon());
        for (int s = s_min; s <= std::min(*chosen + 1, cap); ++s) {
          const double rho = load / (type.service_rate * s);
          if (!(rho > 0.0 && rho < 1.0)) continue;
          const double truth = queueing::expected_wait({load, type.service_rate, s});
          if (wait_floor(load, k, s) >= truth - 1e-9 * truth) continue;
          CutRecord r{j, k, s, rho};
          if (add_cut(r)) added.push_back(r);
        }
      }
    }
    return added;
  }

 private:
  const Instance& inst_;
  BoundMode mode_;
  Evaluator eval_;
  std::vector<double> demand_floor_;
  std::vector<double> open_floor_;
  std::map<std::pair<int, int>, std::map<double, WaitFloor>> pool_;
  long version_ = 0;
};

// Each demand is the closest in-use station among its reachable ones.
bool respects_proximity(const Instance& inst, const std::vector<int>& station_of) {
  std::vector<char> used(inst.num_stations(), 0);
  for (int j : station_of) {
    if (j >= 0) used[j] = 1;
  }
  for (int i = 0; i < inst.num_demands(); ++i) {
    if (station_of[i] < 0) continue;
    const double t = inst.travel_time(i, station_of[i]);
    for (int j : inst.demand(i).reachable_stations) {
      if (used[j] && inst.travel_time(i, j) < t) return false;
    }
  }
  return true;
}

Solution materialize(const Instance& inst, const std::vector<int>& station_of,
                     const std::vector<int>& type_of, IncrementWeight weight) {
  std::vector<Assignment> a;
  for (int i = 0; i < inst.num_demands(); ++i) a.push_back({i, station_of[i], type_of[i]});
  auto sol = solve_assignment(inst, std::move(a), weight);
  if (!sol) throw Error(ErrorCode::Infeasible, "incumbent became infeasible");
  return std::move(*sol);
}

void fill_gap(SolverReport& r) {
  const double lb = *r.lower_bound;
  r.gap = (lb > 0.0 && lb <= r.upper_bound) ? compute_gap(lb, r.upper_bound)
                                            : (lb >= r.upper_bound ? 0.0 : 1.0);
}

}  // namespace

SolverReport brute_force(const Instance& original, const SolverConfig& config) {
  const auto start = Clock::now();
  const Instance capped =
      config.max_chargers ? with_charger_cap(original, *config.max_chargers) : original;
  const Instance& inst = capped;
  const bool proximity = config.enforce_proximity.value_or(inst.enforce_proximity());
  const int n = inst.num_demands();
  const int n_types = inst.num_charger_types();

  double leaves = 1.0;
  for (int i = 0; i < n; ++i) {
    leaves *= static_cast<double>(inst.demand(i).reachable_stations.size()) * n_types;
  }
  if (leaves > config.brute_force_leaf_cap) {
    throw Error(ErrorCode::TooLarge, "enumeration needs " + std::to_string(leaves) +
                                         " leaves, cap is " +
                                         std::to_string(config.brute_force_leaf_cap));
  }
  if (leaves == 0.0) {
    throw Error(ErrorCode::Infeasible, "some demand has no reachable station");
  }

  Evaluator eval(inst, config.increment_weight);
  std::vector<int> digit(n, 0);
  std::vector<int> station_of(n), type_of(n);
  std::vector<int> best_station, best_type;
  double best = std::numeric_limits<double>::infinity();
  long visited = 0;
  double time_to_best = 0.0;

  auto decode = [&](int i) {
    const auto& reach = inst.demand(i).reachable_stations;
    station_of[i] = reach[digit[i] / n_types];
    type_of[i] = digit[i] % n_types;
  };
  for (int i = 0; i < n; ++i) decode(i);

  while (true) {
    ++visited;
    if (!proximity || respects_proximity(inst, station_of)) {
      const auto cost = eval.leaf(station_of, type_of);
      if (cost && *cost < best) {
        best = *cost;
        best_station = station_of;
        best_type = type_of;
        time_to_best = seconds_since(start);
      }
    }
    int i = n - 1;
    while (i >= 0) {
      const int radix = static_cast<int>(inst.demand(i).reachable_stations.size()) * n_types;
      if (++digit[i] < radix) {
        decode(i);
        break;
      }
      digit[i] = 0;
      decode(i);
      --i;
    }
    if (i < 0) break;
  }

  if (best_station.empty() && n > 0) {
    throw Error(ErrorCode::Infeasible, "no assignment admits stable queues within capacity");
  }

  SolverReport report;
  report.method = "brute";
  report.best = materialize(inst, best_station, best_type, config.increment_weight);
  report.upper_bound = report.best.cost.total;
  report.lower_bound = report.upper_bound;
  report.gap = 0.0;
  report.terminated_by = Termination::Optimality;
  report.nodes_explored = visited;
  report.big_m = config.big_m.value_or(default_big_m(inst));
  report.time_to_best_s = time_to_best;
  report.elapsed_s = seconds_since(start);
  return report;
}

namespace {

struct Node {
  double bound = 0.0;
  int depth = 0;
  long seq = 0;
  long cut_version = 0;
  std::vector<std::uint16_t> choice;  // option index per order position
};

// Heap order: smallest bound first, then deepest, then oldest.
bool worse(const Node& a, const Node& b) {
  if (a.bound != b.bound) return a.bound > b.bound;
  if (a.depth != b.depth) return a.depth < b.depth;
  return a.seq > b.seq;
}

struct Option {
  int station;
  int charger;
  double myopic;
};

class Search {
 public:
  Search(const Instance& inst, const SolverConfig& config)
      : inst_(inst),
        config_(config),
        proximity_(config.enforce_proximity.value_or(inst.enforce_proximity())),
        bounder_(inst, config.bound_mode),
        eval_(inst, config.increment_weight),
        n_(inst.num_demands()) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return inst.demand(a).rate > inst.demand(b).rate;
    });
    const auto& c = inst.costs();
    options_.resize(n_);
    for (int p = 0; p < n_; ++p) {
      const int i = order_[p];
      const double rate = inst.demand(i).rate;
      for (int j : inst.demand(i).reachable_stations) {
        for (int k = 0; k < inst.num_charger_types(); ++k) {
          const double myopic =
              rate * (c.travel * inst.travel_time(i, j) + c.wait / inst.charger(k).service_rate);
          options_[p].push_back({j, k, myopic});
        }
      }
      std::stable_sort(options_[p].begin(), options_[p].end(),
                       [](const Option& a, const Option& b) { return a.myopic < b.myopic; });
    }
    for (const auto& r : config.initial_cuts) {
      if (bounder_.add_cut(r)) cuts_.push_back(r);
    }
  }

  SolverReport run() {
    start_ = Clock::now();
    warm_start();

    std::vector<int> station_of(n_, -1), type_of(n_, -1);
    Node root;
    root.bound = bounder_.bound(station_of, type_of);
    root.cut_version = bounder_.version();
    if (n_ == 0) {
      consider_leaf(station_of, type_of);
    } else {
      heap_.push_back(std::move(root));
    }

    Termination how = Termination::Optimality;
    while (!heap_.empty() || !stack_.empty()) {
      if (config_.time_limit_s && seconds_since(start_) >= *config_.time_limit_s) {
        how = Termination::Time;
        break;
      }
      if (config_.gap_threshold > 0.0 && stack_.empty() && std::isfinite(upper_) &&
          !heap_.empty()) {
        const double lb = std::min(heap_.front().bound, pruned_floor_);
        if (lb > 0.0 && lb <= upper_ && compute_gap(lb, upper_) <= config_.gap_threshold) {
          how = Termination::Gap;
          break;
        }
      }
      Node node = pop();
      process(std::move(node));
    }

    if (!std::isfinite(upper_)) {
      if (how == Termination::Time) {
        throw Error(ErrorCode::TimeLimit, "time limit reached before any feasible solution");
      }
      throw Error(ErrorCode::Infeasible, "no assignment admits stable queues within capacity");
    }

    double lower = std::min(upper_, pruned_floor_);
    for (const auto& nd : heap_) lower = std::min(lower, nd.bound);
    for (const auto& nd : stack_) lower = std::min(lower, nd.bound);
    if (how == Termination::Optimality && lower < upper_) how = Termination::Gap;

    SolverReport report;
    report.method = "bnb";
    report.best = materialize(inst_, best_station_, best_type_, config_.increment_weight);
    report.upper_bound = report.best.cost.total;
    report.lower_bound = how == Termination::Optimality ? report.upper_bound
                                                        : std::min(lower, report.upper_bound);
    fill_gap(report);
    report.terminated_by = how;
    report.nodes_explored = nodes_;
    report.cuts = cuts_;
    report.cuts_added = static_cast<long>(cuts_.size()) -
                        static_cast<long>(config_.initial_cuts.size());
    report.cuts_added = std::max(report.cuts_added, 0L);
    report.big_m = config_.big_m.value_or(default_big_m(inst_));
    report.time_to_best_s = time_to_best_;
    report.elapsed_s = seconds_since(start_);
    return report;
  }

 private:
  Node pop() {
    if (!stack_.empty()) {
      Node n = std::move(stack_.back());
      stack_.pop_back();
      return n;
    }
    std::pop_heap(heap_.begin(), heap_.end(), worse);
    Node n = std::move(heap_.back());
    heap_.pop_back();
    return n;
  }

  double threshold() const { return upper_ * (1.0 - config_.gap_threshold); }

  // Returns true if the node is kept.
  bool admit(double bound) {
    if (bound < threshold()) return true;
    if (bound < upper_) pruned_floor_ = std::min(pruned_floor_, bound);
    return false;
  }

  void decode(const Node& node, std::vector<int>& station_of, std::vector<int>& type_of) const {
    std::fill(station_of.begin(), station_of.end(), -1);
    std::fill(type_of.begin(), type_of.end(), -1);
    for (int p = 0; p < node.depth; ++p) {
      const auto& o = options_[p][node.choice[p]];
      station_of[order_[p]] = o.station;
      type_of[order_[p]] = o.charger;
    }
  }

  void process(Node node) {
    ++nodes_;
    std::vector<int> station_of(n_), type_of(n_);
    decode(node, station_of, type_of);
    if (node.cut_version != bounder_.version()) {
      node.bound = bounder_.bound(station_of, type_of);
    }
    if (!admit(node.bound)) return;

    std::vector<char> used(inst_.num_stations(), 0);
    for (int j : station_of) {
      if (j >= 0) used[j] = 1;
    }
    const int p = node.depth;
    const int i = order_[p];
    std::vector<Node> children;
    for (std::size_t c = 0; c < options_[p].size(); ++c) {
      const auto& o = options_[p][c];
      if (proximity_ && !proximity_ok(i, o.station, used, station_of)) continue;
      station_of[i] = o.station;
      type_of[i] = o.charger;
      if (p + 1 == n_) {
        ++nodes_;
        consider_leaf(station_of, type_of);
      } else {
        Node child;
        child.bound = bounder_.bound(station_of, type_of);
        if (admit(child.bound)) {
          child.depth = p + 1;
          child.seq = seq_++;
          child.cut_version = bounder_.version();
          child.choice = node.choice;
          child.choice.push_back(static_cast<std::uint16_t>(c));
          children.push_back(std::move(child));
        }
      }
      station_of[i] = -1;
      type_of[i] = -1;
    }

    const bool dive = !stack_.empty() || heap_.size() + children.size() > config_.max_open_nodes;
    if (dive) {
      // Best myopic child on top of the stack.
      for (auto it = children.rbegin(); it != children.rend(); ++it) stack_.push_back(std::move(*it));
    } else {
      for (auto& ch : children) {
        heap_.push_back(std::move(ch));
        std::push_heap(heap_.begin(), heap_.end(), worse);
      }
    }
  }

  // Adding i -> j keeps every committed demand at its closest in-use station
  // and j closest for i.
  bool proximity_ok(int i, int j, const std::vector<char>& used,
                    const std::vector<int>& station_of) const {
    const double t = inst_.travel_time(i, j);
    for (int other : inst_.demand(i).reachable_stations) {
      if (used[other] && inst_.travel_time(i, other) < t) return false;
    }
    if (used[j]) return true;
    for (int d : inst_.station(j).served_demands) {
      const int assigned = station_of[d];
      if (assigned >= 0 && inst_.travel_time(d, j) < inst_.travel_time(d, assigned)) return false;
    }
    return true;
  }

  void consider_leaf(const std::vector<int>& station_of, const std::vector<int>& type_of) {
    if (proximity_ && !respects_proximity(inst_, station_of)) return;
    const auto cost = eval_.leaf(station_of, type_of);
    if (!cost) return;
    if (config_.bound_mode == BoundMode::Cuts) {
      for (auto& r : bounder_.leaf_cuts(station_of, type_of)) cuts_.push_back(r);
    }
    if (*cost < upper_) {
      upper_ = *cost;
      best_station_ = station_of;
      best_type_ = type_of;
      time_to_best_ = seconds_since(start_);
    }
  }

  void warm_start() {
    std::vector<int> station_of(n_), type_of(n_);
    if (config_.warm_start) {
      const auto& a = config_.warm_start->assignments;
      bool ok = static_cast<int>(a.size()) == n_;
      for (const auto& x : a) {
        ok = ok && x.demand >= 0 && x.demand < n_ && inst_.reachable(x.demand, x.station) &&
             x.charger >= 0 && x.charger < inst_.num_charger_types();
        if (ok) {
          station_of[x.demand] = x.station;
          type_of[x.demand] = x.charger;
        }
      }
      if (ok) consider_leaf(station_of, type_of);
    }
    // Nearest station within a greedy cover (or overall), one type for all.
    std::vector<std::vector<int>> station_sets;
    try {
      station_sets.push_back(min_stations(inst_));
    } catch (const Error&) {
    }
    std::vector<int> all(inst_.num_stations());
    std::iota(all.begin(), all.end(), 0);
    station_sets.push_back(all);
    for (const auto& active : station_sets) {
      std::vector<char> on(inst_.num_stations(), 0);
      for (int j : active) on[j] = 1;
      bool ok = true;
      for (int i = 0; i < n_ && ok; ++i) {
        int best = -1;
        for (int j : inst_.demand(i).reachable_stations) {
          if (on[j] && (best < 0 || inst_.travel_time(i, j) < inst_.travel_time(i, best))) best = j;
        }
        ok = best >= 0;
        station_of[i] = best;
      }
      if (!ok) continue;
      for (int k = 0; k < inst_.num_charger_types(); ++k) {
        std::fill(type_of.begin(), type_of.end(), k);
        consider_leaf(station_of, type_of);
      }
    }
    // Largest demands first into the cheapest option with spare capacity.
    std::vector<std::vector<double>> load(inst_.num_stations(),
                                          std::vector<double>(inst_.num_charger_types(), 0.0));
    bool placed_all = true;
    for (int p = 0; p < n_ && placed_all; ++p) {
      const int i = order_[p];
      const double rate = inst_.demand(i).rate;
      placed_all = false;
      for (const auto& o : options_[p]) {
        const double room = inst_.charger(o.charger).service_rate *
                            inst_.max_chargers(o.station, o.charger) * (1.0 - inst_.epsilon());
        if (load[o.station][o.charger] + rate < room) {
          load[o.station][o.charger] += rate;
          station_of[i] = o.station;
          type_of[i] = o.charger;
          placed_all = true;
          break;
        }
      }
    }
    if (placed_all) consider_leaf(station_of, type_of);
  }

  const Instance& inst_;
  const SolverConfig& config_;
  bool proximity_;
  Bounder bounder_;
  Evaluator eval_;
  int n_;
  std::vector<int> order_;
  std::vector<std::vector<Option>> options_;

  std::vector<Node> heap_;
  std::vector<Node> stack_;
  long seq_ = 0;
  long nodes_ = 0;
  double upper_ = std::numeric_limits<double>::infinity();
  double pruned_floor_ = std::numeric_limits<double>::infinity();
  std::vector<int> best_station_;
  std::vector<int> best_type_;
  std::vector<CutRecord> cuts_;
  Clock::time_point start_;
  double time_to_best_ = 0.0;
};

}  // namespace

SolverReport branch_and_bound(const Instance& original, const SolverConfig& config) {
  if (!(config.gap_threshold >= 0.0 && config.gap_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gap threshold must lie in [0, 1)");
  }
  const Instance capped =
      config.max_chargers ? with_charger_cap(original, *config.max_chargers) : original;
  for (int i = 0; i < capped.num_demands(); ++i) {
    if (capped.demand(i).reachable_stations.empty()) {
      throw Error(ErrorCode::Infeasible, "demand " + capped.demand(i).id + " reaches no station",
                  {capped.demand(i).id});
    }
  }
  return Search(capped, config).run();
}

double node_lower_bound(const Instance& instance, const std::vector<Assignment>& partial,
                        const std::vector<CutRecord>& cuts, BoundMode mode) {
  Bounder b(instance, mode);
  for (const auto& r : cuts) b.add_cut(r);
  std::vector<int> station_of(instance.num_demands(), -1), type_of(instance.num_demands(), -1);
  for (const auto& a : partial) {
    station_of[a.demand] = a.station;
    type_of[a.demand] = a.charger;
  }
  return b.bound(station_of, type_of);
}

}  // namespace placebeb
