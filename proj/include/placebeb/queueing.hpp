#pragma once

// Steady-state M/M/s delay quantities used by the location model.
//
// All rates are per minute; waits are in minutes. Utilization is
// rho = arrival / (service * servers) and every delay evaluation requires
// rho < 1.

namespace placebeb::queueing {

struct QueueModel {
  double arrival_rate = 0.0;
  double service_rate = 0.0;
  int servers = 0;

  double offered_load() const { return arrival_rate / service_rate; }
  double utilization() const;
};

// Affine underestimator intercept + slope * rho of w_nu for a fixed server
// count, touching it at anchor_rho.
struct TangentCut {
  double intercept = 0.0;
  double slope = 0.0;
  double anchor_rho = 0.0;
  int servers = 0;
  double service_rate = 0.0;

  double operator()(double rho) const { return intercept + slope * rho; }
};

// Erlang-B blocking probability via B(n) = a B(n-1) / (n + a B(n-1)).
double erlang_b(double offered_load, int servers);

// Probability that an arriving vehicle finds all chargers busy. Returns 0 for
// zero servers. Throws UnstableQueue when rho >= 1.
double erlang_c(const QueueModel& model);

// Expected time in system (queueing plus charging).
double expected_wait(const QueueModel& model);

// Erlang-C probability divided by (1 - rho); the rho-dependent part of the
// wait. service_rate does not enter the value but is kept for symmetry with
// the cut it feeds.
double w_nu(double rho, int servers, double service_rate);

// Supporting line of w_nu at anchor_rho. Slope by central finite difference
// with step kCutStep, clamped inside (0, 1).
TangentCut tangent_cut(double anchor_rho, int servers, double service_rate);

inline constexpr double kCutStep = 1e-6;

}  // namespace placebeb::queueing
