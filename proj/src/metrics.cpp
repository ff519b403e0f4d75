#include "perishfair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "perishfair/error.hpp"

namespace perishfair {

MetricsReport compute_metrics(const ProblemInstance& instance, const SamplePath& path, const Trajectory& trajectory) {
  if (trajectory.rounds.size() != instance.horizon || path.horizon() != instance.horizon ||
      path.n_types() != instance.types.size()) {
    throw Error(ErrorCode::kInvalidInput, "trajectory, path and instance dimensions differ");
  }
  MetricsReport m;
  const double B = static_cast<double>(instance.budget);
  const double proportional = B / path.total_arrivals();

  // Every type receives the same X_t, so only the heaviest type present in a
  // round matters on either side of an envy comparison.
  std::vector<double> w_round(trajectory.rounds.size(), 0.0);
  double x_max = -INFINITY;
  for (std::size_t i = 0; i < trajectory.rounds.size(); ++i) {
    const auto& r = trajectory.rounds[i];
    for (std::size_t th = 0; th < instance.types.size(); ++th) {
      if (path.arrivals(r.round, th) > 0.0) w_round[i] = std::max(w_round[i], instance.types[th].weight);
    }
    if (w_round[i] == 0.0) continue;
    m.counterfactual_envy = std::max(m.counterfactual_envy, w_round[i] * std::abs(r.x_t - proportional));
    x_max = std::max(x_max, r.x_t);
  }
  for (std::size_t i = 0; i < trajectory.rounds.size(); ++i) {
    if (w_round[i] == 0.0) continue;
    m.hindsight_envy = std::max(m.hindsight_envy, w_round[i] * (x_max - trajectory.rounds[i].x_t));
  }
  m.inefficiency = B - trajectory.total_allocated();
  m.spoilage = trajectory.total_spoilage();
  m.leftover = trajectory.leftover;
  m.stockout = trajectory.stockout();
  m.offset_expiring = check_offset_expiry(path);
  return m;
}

bool check_offset_expiry(const SamplePath& path) {
  const double B = static_cast<double>(path.budget());
  const double N = path.total_arrivals();
  for (std::size_t t = 2; t <= path.horizon(); ++t) {
    const double lhs = static_cast<double>(path.perished_before(t)) * N;
    const double rhs = path.arrivals_before(t) * B;
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

ProbabilityEstimate estimate_oe_probability(const ProblemInstance& instance, long reps, std::uint64_t seed) {
  if (reps < 1) throw Error(ErrorCode::kInvalidConfig, "reps must be >= 1");
  long hits = 0;
  for (long r = 0; r < reps; ++r) {
    const SamplePath path = sample_path(instance, replication_seed(seed, static_cast<std::uint64_t>(r)));
    if (check_offset_expiry(path)) ++hits;
  }
  ProbabilityEstimate e;
  e.reps = reps;
  e.estimate = static_cast<double>(hits) / static_cast<double>(reps);
  e.ci_halfwidth = 1.96 * std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(reps));
  return e;
}

}  // namespace perishfair
