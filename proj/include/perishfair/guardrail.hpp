#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "perishfair/bounds.hpp"
#include "perishfair/core.hpp"

namespace perishfair {

// kZero drops the perishing confidence term, for deterministic constructions.
enum class ConfMode { kFull, kZero };

struct MuMethod {
  enum class Kind { kAnalytic, kMonteCarlo };
  Kind kind = Kind::kAnalytic;
  long reps = 0;
  std::uint64_t seed = 0;

  static MuMethod analytic() { return {}; }
  static MuMethod monte_carlo(long reps, std::uint64_t seed) { return {Kind::kMonteCarlo, reps, seed}; }
};

struct MuEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for the analytic method
};

// Slow-process consumption curve from round t: entry k is the running max of
// N-lower_{<t} + N-lower_{[t, t+k]}. Monotone, so latest allocation times can
// be found by binary search.
class SlowProcess {
 public:
  SlowProcess(const DemandBounds& bounds, std::size_t t);

  std::size_t start() const noexcept { return start_; }
  // N-lower_{<t}.
  double consumed_before() const noexcept { return before_; }
  // First t' >= t with x * curve(t') >= rank, or nullopt.
  std::optional<std::size_t> tau(std::size_t rank, double x) const;
  // min(T, tau), treating "never" as T.
  std::size_t tau_capped(std::size_t rank, double x) const;

 private:
  std::size_t start_;
  std::size_t horizon_;
  double before_;
  std::vector<double> curve_;
};

struct GuardrailPlan {
  double x_lower = 0.0;      // X-lower
  double x_upper = 0.0;      // X-lower + L_T
  double l_perish = 0.0;     // B / N-bar - X-lower
  double n_bar = 0.0;        // E[N] + Conf^N_{0,T}
  double baseline = 0.0;     // B / N-bar
  double delta_bar_at_x_lower = 0.0;
  double envy_budget = 0.0;  // L_T
  double epsilon = 0.0;      // line-search step
  ConfMode conf_mode = ConfMode::kFull;
  std::vector<double> eta;    // eta[t-1]
  std::vector<double> p_bar;  // p_bar[t-1] = P-bar_t
  // Per round: E[N_{>t}] + Conf^N_{t,T}.
  std::vector<double> n_upper_after;

  // Same plan with a different envy budget (X-upper moves, nothing else does).
  GuardrailPlan with_envy_budget(double lt) const;
};

struct PlanOptions {
  double epsilon = 0.0;  // <= 0 selects 1e-3 * B / N-bar
  ConfMode conf_mode = ConfMode::kFull;
  MuMethod mu_method = MuMethod::analytic();
};

std::optional<std::size_t> tau_b(const ProblemInstance& instance, const Schedule& schedule, std::size_t b,
                                 std::size_t t, double x);

MuEstimate mu_of_x_estimate(const ProblemInstance& instance, const Schedule& schedule, double x,
                            const MuMethod& method);
double mu_of_x(const ProblemInstance& instance, const Schedule& schedule, double x,
               const MuMethod& method = MuMethod::analytic());

double delta_bar(const ProblemInstance& instance, const Schedule& schedule, double x,
                 ConfMode mode = ConfMode::kFull, const MuMethod& method = MuMethod::analytic());

// Scans X = B/N-bar - k * epsilon downward and stops at the first grid point
// with X <= (B - delta_bar(X)) / N-bar. Fills eta and P-bar as well.
GuardrailPlan compute_x_lower(const ProblemInstance& instance, const Schedule& schedule,
                              const PlanOptions& options = {});

double eta_t(const ProblemInstance& instance, const Schedule& schedule, const GuardrailPlan& plan, std::size_t t);

std::vector<double> p_bar_sequence(const ProblemInstance& instance, const Schedule& schedule,
                                   const GuardrailPlan& plan);

// Row of the X-lower line search, for plotting.
struct XGridPoint {
  double x = 0.0;
  double delta_bar = 0.0;
  double rhs = 0.0;  // (B - delta_bar) / N-bar
};
std::vector<XGridPoint> x_grid(const ProblemInstance& instance, const Schedule& schedule, std::size_t points,
                               ConfMode mode = ConfMode::kFull);

// Closed-form offset-expiry and X-lower bounds for B = N = T with one arrival
// per round. Fields that do not apply stay nullopt.
struct AnalyticBoundsReport {
  bool applicable = false;
  std::string reason;

  // Necessary condition: some t with E[P_{<t}] > t - 1.
  bool necessary_condition_violated = false;
  // Offset-expiry impossible for delta below this (1 when impossible for all).
  std::optional<double> infeasible_below_delta;

  // Sufficient delta when E[P_{<t}] <= t - 1 for all t >= 2.
  std::optional<double> sufficient_delta;

  // i.i.d. geometric perishing.
  std::optional<double> geometric_delta;
  std::optional<double> geometric_x_lower_bound;
  std::optional<double> geometric_l_perish_bound;
  bool geometric_vacuous = false;  // T p >= 1

  // Room-to-breathe conditions for a given alpha.
  std::optional<double> alpha;
  bool alpha_condition_mean = false;
  bool alpha_condition_variance = false;
  std::optional<double> alpha_delta;
  std::optional<double> alpha_x_lower_bound;
};

AnalyticBoundsReport analytic_bounds(const ProblemInstance& instance, const Schedule& schedule,
                                     std::optional<double> alpha = std::nullopt);

}  // namespace perishfair
