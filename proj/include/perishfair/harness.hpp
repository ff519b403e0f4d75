#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "perishfair/core.hpp"
#include "perishfair/engine.hpp"
#include "perishfair/guardrail.hpp"
#include "perishfair/metrics.hpp"

namespace perishfair {

// ---------------------------------------------------------------------------
// Named instances
// ---------------------------------------------------------------------------

// Fitted geometric perishing rate used for the ginger instance, and the
// maximum-likelihood value quoted alongside the calibration procedure. The
// two disagree in the third significant digit; the first drives the instance.
inline constexpr double kGingerPerishRate = 0.00224;
inline constexpr double kGingerPerishRateMle = 0.0024;
inline constexpr double kGingerDemandMean = 3.2;
inline constexpr double kGingerDemandSd = 1.85;
inline constexpr std::size_t kGingerHorizon = 365;
inline constexpr std::size_t kGingerBudget = 1168;

// Synthetic experiments draw N_t from Normal(2, 0.5^2).
inline constexpr double kSyntheticDemandMean = 2.0;
inline constexpr double kSyntheticDemandSd = 0.5;

// Default L_T = T^-beta exponent for table runs.
inline constexpr double kDefaultEnvyExponent = 0.35;

// Truncated-normal demand of the named stochastic instances is cut to
// [mean - k sd, mean + k sd] (lower end floored at 1); k is this width.
inline constexpr double kNamedTruncationWidth = 1.0;

struct NamedInstanceParams {
  std::string name;
  std::size_t horizon = 0;  // 0 selects the instance default
  std::size_t budget = 0;   // 0 selects the instance default
  double alpha = 0.0;       // geometric sweep: p = T^-(1 + alpha)
  double truncation_width = kNamedTruncationWidth;
  ScheduleKind schedule = ScheduleKind::kLCB;  // front/back-loaded only
};

// Recognized names:
//   running_example   three units, N = (1, 2, 1), two-point perishing laws
//   flipped_order     B = T, N_t = 1, T_b = b, ranks T + 1 - b
//   geometric_sweep   B = 2T, Geometric(T^-(1+alpha)), identity schedule
//   front_loaded      T_b ~ U(T/2 - b/2, T/2 + b/2) for b <= T, else T
//   back_loaded       T_b = b + 1 for b <= T, else U(T, b + 1)
//   ginger            T = 365, B = 1168, Geometric(0.00224), N(3.2, 1.85^2)
// Throws UnknownInstance otherwise.
ProblemInstance make_named_instance(const NamedInstanceParams& params);
std::vector<std::string> named_instances();

// Demand used by the named stochastic instances.
DemandSpec named_truncated_normal(std::size_t horizon, double mean, double sd, double width);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  ProblemInstance instance;
  std::vector<PolicyKind> policies;
  // L_T values to run; empty runs instance.envy_budget only.
  std::vector<double> envy_budgets;
  long replications = 150;
  std::uint64_t base_seed = 1;
  std::size_t workers = 0;  // 0: PERISHFAIR_THREADS, else hardware concurrency
  PlanOptions plan_options;
  std::string csv_path;  // per-replication output; empty to skip
};

struct ReplicationRecord {
  long replication = 0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::kPerishingGuardrail;
  double envy_budget = 0.0;
  double x_lower = 0.0;
  double l_perish = 0.0;
  MetricsReport metrics;
};

struct Summary {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sd / sqrt(R)
};

Summary summarize(const std::vector<double>& values);

struct AggregateRow {
  PolicyKind policy = PolicyKind::kPerishingGuardrail;
  double envy_budget = 0.0;
  long count = 0;
  Summary counterfactual_envy;
  Summary hindsight_envy;
  Summary inefficiency;
  Summary spoilage;
  Summary stockout;
  Summary l_perish;
  Summary x_lower;
};

struct AggregateStats {
  std::vector<AggregateRow> rows;  // ordered by (envy budget, policy) as configured

  const AggregateRow& find(PolicyKind policy, double envy_budget) const;
  const AggregateRow& find(PolicyKind policy) const;
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;  // ordered by (replication, envy budget, policy)
  AggregateStats stats;
};

std::size_t resolve_workers(std::size_t requested);

ExperimentResult run_experiment(const ExperimentConfig& config);

AggregateStats aggregate(const std::vector<ReplicationRecord>& records, const std::vector<PolicyKind>& policies,
                         const std::vector<double>& envy_budgets);

void write_replication_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
void write_replication_csv(const std::string& path, const std::vector<ReplicationRecord>& records);
std::vector<ReplicationRecord> read_replication_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Trade-off sweeps
// ---------------------------------------------------------------------------

inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

// 0, 0.05, ..., 1 followed by the infinity sentinel (L_T = 0).
std::vector<double> default_beta_grid();
double envy_budget_for_beta(std::size_t horizon, double beta);

struct SweepRow {
  PolicyKind policy = PolicyKind::kPerishingGuardrail;
  double beta = 0.0;
  double envy_budget = 0.0;
  AggregateRow stats;
};

std::vector<SweepRow> sweep_tradeoff(ExperimentConfig config, const std::vector<double>& betas);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------------------
// Retail calibration
// ---------------------------------------------------------------------------

struct RetailDay {
  std::string day;
  double begin_stock = 0.0;
  double restock = 0.0;
  double sales = 0.0;
  double end_stock = 0.0;
};

using RetailSeries = std::vector<RetailDay>;

struct RetailCalibration {
  double p_hat = 0.0;
  double p_hat_std_error = 0.0;
  double demand_mean = 0.0;
  double demand_sd = 0.0;
  std::size_t days = 0;
};

RetailSeries read_retail_csv(std::istream& in);
RetailSeries read_retail_csv(const std::string& path);
RetailCalibration calibrate_retail(const RetailSeries& series);

}  // namespace perishfair
