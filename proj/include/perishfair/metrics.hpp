#pragma once

#include <cstdint>

#include "perishfair/core.hpp"
#include "perishfair/engine.hpp"

namespace perishfair {

struct MetricsReport {
  double counterfactual_envy = 0.0;  // max weighted |X_t - B/N|, realized N
  double hindsight_envy = 0.0;       // max weighted X_t' - X_t
  double inefficiency = 0.0;         // B - sum N_t X_t
  double spoilage = 0.0;             // sum PUA_t
  double leftover = 0.0;
  bool stockout = false;
  bool offset_expiring = false;
};

MetricsReport compute_metrics(const ProblemInstance& instance, const SamplePath& path, const Trajectory& trajectory);

// P_{<t} / B <= N_{<t} / N for every t in 2..T.
bool check_offset_expiry(const SamplePath& path);

struct ProbabilityEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sqrt(p (1 - p) / R)
  long reps = 0;
};

ProbabilityEstimate estimate_oe_probability(const ProblemInstance& instance, long reps, std::uint64_t seed);

}  // namespace perishfair
