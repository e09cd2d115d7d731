#include "placebeb/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "placebeb/error.hpp"

namespace placebeb::queueing {
namespace {

void require_stable(double rho, const char* where) {
  if (!(rho < 1.0) || std::isnan(rho)) {
    throw Error(ErrorCode::UnstableQueue,
                std::string(where) + ": utilization " + std::to_string(rho) + " is not below 1");
  }
}

// Erlang C from offered load a and server count s, given rho = a / s < 1.
double erlang_c_from_load(double offered_load, int servers) {
  if (servers <= 0 || offered_load <= 0.0) return 0.0;
  const double rho = offered_load / servers;
  const double blocking = erlang_b(offered_load, servers);
  return blocking / (1.0 - rho * (1.0 - blocking));
}

}  // namespace

double QueueModel::utilization() const {
  if (servers <= 0) return arrival_rate > 0.0 ? INFINITY : 0.0;
  return arrival_rate / (service_rate * servers);
}

double erlang_b(double offered_load, int servers) {
  double b = 1.0;
  for (int n = 1; n <= servers; ++n) {
    b = offered_load * b / (n + offered_load * b);
  }
  return b;
}

double erlang_c(const QueueModel& model) {
  if (model.servers <= 0) return 0.0;
  if (!(model.service_rate > 0.0) || model.arrival_rate < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "erlang_c: rates must be positive");
  }
  require_stable(model.utilization(), "erlang_c");
  return erlang_c_from_load(model.offered_load(), model.servers);
}

double expected_wait(const QueueModel& model) {
  if (model.servers <= 0) {
    throw Error(ErrorCode::UnstableQueue, "expected_wait: no chargers to serve demand");
  }
  const double probability = erlang_c(model);
  const double rho = model.utilization();
  return probability / (model.service_rate * model.servers * (1.0 - rho)) +
         1.0 / model.service_rate;
}

double w_nu(double rho, int servers, double service_rate) {
  (void)service_rate;
  if (servers <= 0) {
    throw Error(ErrorCode::InvalidArgument, "w_nu: at least one server is required");
  }
  if (rho < 0.0) throw Error(ErrorCode::InvalidArgument, "w_nu: negative utilization");
  require_stable(rho, "w_nu");
  return erlang_c_from_load(rho * servers, servers) / (1.0 - rho);
}

TangentCut tangent_cut(double anchor_rho, int servers, double service_rate) {
  if (!(anchor_rho > 0.0 && anchor_rho < 1.0)) {
    throw Error(ErrorCode::UnstableQueue,
                "tangent_cut: anchor " + std::to_string(anchor_rho) + " outside (0, 1)");
  }
  // Keep both stencil points strictly inside the open interval.
  constexpr double kEdge = 1e-12;
  const double lo = std::max(anchor_rho - kCutStep, kEdge);
  const double hi = std::min(anchor_rho + kCutStep, 1.0 - kEdge);

  TangentCut cut;
  cut.anchor_rho = anchor_rho;
  cut.servers = servers;
  cut.service_rate = service_rate;
  cut.slope = (w_nu(hi, servers, service_rate) - w_nu(lo, servers, service_rate)) / (hi - lo);
  cut.intercept = w_nu(anchor_rho, servers, service_rate) - cut.slope * anchor_rho;
  return cut;
}

}  // namespace placebeb::queueing
