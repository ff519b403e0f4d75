#include "perishfair/guardrail.hpp"

#include <algorithm>
#include <cmath>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

// Relative slack for the threshold comparisons in the slow process and the
// line search; keeps exact rational cases (e.g. 0.75 * 4 >= 3) stable.
constexpr double kRelTol = 1e-12;

double eta_from(const ProblemInstance& instance, const Schedule& schedule, const DemandBounds& bounds, double x,
                std::size_t t) {
  const SlowProcess slow(bounds, t);
  const std::size_t B = instance.budget;
  const double consumed = slow.consumed_before() * x;
  std::size_t first_rank = static_cast<std::size_t>(std::max(1.0, std::ceil(consumed - 1e-9)));
  const long before = static_cast<long>(t) - 1;
  double eta = 0.0;
  for (std::size_t r = first_rank; r <= B; ++r) {
    const std::size_t b = schedule.unit_at_rank(r);
    const long cap = static_cast<long>(slow.tau_capped(r, x));
    const double p = instance.perishing.cdf(b, cap - 1) - instance.perishing.cdf(b, before);
    if (p > 0.0) eta += p;
  }
  return eta;
}

void check_inputs(const ProblemInstance& instance, const Schedule& schedule) {
  if (schedule.size() != instance.budget) {
    throw Error(ErrorCode::kInvalidSchedule, "schedule size does not match budget");
  }
}

}  // namespace

SlowProcess::SlowProcess(const DemandBounds& bounds, std::size_t t)
    : start_(t), horizon_(bounds.horizon()), before_(bounds.lower(1, t - 1)) {
  if (t < 1 || t > horizon_) throw Error(ErrorCode::kInvalidInput, "round out of range");
  curve_.reserve(horizon_ - t + 1);
  double running = 0.0;
  for (std::size_t tp = t; tp <= horizon_; ++tp) {
    running = std::max(running, before_ + bounds.lower(t, tp));
    curve_.push_back(running);
  }
}

std::optional<std::size_t> SlowProcess::tau(std::size_t rank, double x) const {
  if (!(x > 0.0)) return std::nullopt;
  const double need = static_cast<double>(rank) * (1.0 - kRelTol);
  const auto it = std::partition_point(curve_.begin(), curve_.end(), [&](double c) { return x * c < need; });
  if (it == curve_.end()) return std::nullopt;
  return start_ + static_cast<std::size_t>(it - curve_.begin());
}

std::size_t SlowProcess::tau_capped(std::size_t rank, double x) const {
  const auto t = tau(rank, x);
  return t ? std::min(*t, horizon_) : horizon_;
}

GuardrailPlan GuardrailPlan::with_envy_budget(double lt) const {
  GuardrailPlan p = *this;
  p.envy_budget = lt;
  p.x_upper = p.x_lower + lt;
  return p;
}

std::optional<std::size_t> tau_b(const ProblemInstance& instance, const Schedule& schedule, std::size_t b,
                                 std::size_t t, double x) {
  check_inputs(instance, schedule);
  const DemandBounds bounds(instance);
  return SlowProcess(bounds, t).tau(schedule.rank_of_unit(b), x);
}

MuEstimate mu_of_x_estimate(const ProblemInstance& instance, const Schedule& schedule, double x,
                            const MuMethod& method) {
  check_inputs(instance, schedule);
  const DemandBounds bounds(instance);
  const SlowProcess slow(bounds, 1);
  const std::size_t B = instance.budget;
  std::vector<long> cap(B);
  for (std::size_t b = 0; b < B; ++b) cap[b] = static_cast<long>(slow.tau_capped(schedule.rank_of_unit(b), x));

  if (method.kind == MuMethod::Kind::kAnalytic) {
    double mu = 0.0;
    for (std::size_t b = 0; b < B; ++b) mu += instance.perishing.cdf(b, cap[b] - 1);
    return {mu, 0.0};
  }
  if (method.reps <= 0) throw Error(ErrorCode::kInvalidConfig, "Monte-Carlo mu needs reps > 0");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long r = 0; r < method.reps; ++r) {
    Rng rng(stream_seed(replication_seed(method.seed, static_cast<std::uint64_t>(r)), Stream::kMonteCarlo));
    double count = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      if (instance.perishing.sample(b, rng) < cap[b]) count += 1.0;
    }
    sum += count;
    sum_sq += count * count;
  }
  const double n = static_cast<double>(method.reps);
  const double mean = sum / n;
  const double var = method.reps > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double mu_of_x(const ProblemInstance& instance, const Schedule& schedule, double x, const MuMethod& method) {
  return mu_of_x_estimate(instance, schedule, x, method).value;
}

double delta_bar(const ProblemInstance& instance, const Schedule& schedule, double x, ConfMode mode,
                 const MuMethod& method) {
  const double mu = mu_of_x(instance, schedule, x, method);
  const double conf = mode == ConfMode::kZero ? 0.0 : conf_p(1, mu, instance.horizon, instance.delta);
  return std::min(static_cast<double>(instance.budget), mu + conf);
}

GuardrailPlan compute_x_lower(const ProblemInstance& instance, const Schedule& schedule,
                              const PlanOptions& options) {
  instance.validate();
  check_inputs(instance, schedule);
  const DemandBounds bounds(instance);
  const double B = static_cast<double>(instance.budget);

  GuardrailPlan plan;
  plan.conf_mode = options.conf_mode;
  plan.n_bar = bounds.n_bar();
  plan.baseline = B / plan.n_bar;
  plan.epsilon = options.epsilon > 0.0 ? options.epsilon : 1e-3 * plan.baseline;

  const double slack = kRelTol * std::max(1.0, plan.baseline);
  double x = plan.baseline;
  double dbar = 0.0;
  for (long k = 0;; ++k) {
    x = std::max(0.0, plan.baseline - static_cast<double>(k) * plan.epsilon);
    dbar = delta_bar(instance, schedule, x, options.conf_mode, options.mu_method);
    if (x <= (B - dbar) / plan.n_bar + slack || x == 0.0) break;
  }
  plan.x_lower = x;
  plan.l_perish = plan.baseline - x;
  plan.delta_bar_at_x_lower = dbar;
  plan.envy_budget = instance.envy_budget;
  plan.x_upper = x + instance.envy_budget;

  const std::size_t T = instance.horizon;
  plan.eta.resize(T);
  plan.n_upper_after.resize(T);
  for (std::size_t t = 1; t <= T; ++t) {
    plan.eta[t - 1] = eta_from(instance, schedule, bounds, plan.x_lower, t);
    plan.n_upper_after[t - 1] = bounds.upper_after(t);
  }
  plan.p_bar = p_bar_sequence(instance, schedule, plan);
  return plan;
}

double eta_t(const ProblemInstance& instance, const Schedule& schedule, const GuardrailPlan& plan, std::size_t t) {
  check_inputs(instance, schedule);
  if (t < 1 || t > instance.horizon) throw Error(ErrorCode::kInvalidInput, "round out of range");
  return eta_from(instance, schedule, DemandBounds(instance), plan.x_lower, t);
}

std::vector<double> p_bar_sequence(const ProblemInstance& instance, const Schedule& schedule,
                                   const GuardrailPlan& plan) {
  check_inputs(instance, schedule);
  const std::size_t T = instance.horizon;
  std::vector<double> eta = plan.eta;
  if (eta.size() != T) {
    eta.resize(T);
    const DemandBounds bounds(instance);
    for (std::size_t t = 1; t <= T; ++t) eta[t - 1] = eta_from(instance, schedule, bounds, plan.x_lower, t);
  }
  std::vector<double> out(T);
  double prev = static_cast<double>(instance.budget);
  for (std::size_t t = 1; t <= T; ++t) {
    const double e = eta[t - 1];
    const double conf = plan.conf_mode == ConfMode::kZero ? 0.0 : conf_p(t, e, T, instance.delta);
    prev = std::min(prev, e + conf);
    out[t - 1] = prev;
  }
  return out;
}

std::vector<XGridPoint> x_grid(const ProblemInstance& instance, const Schedule& schedule, std::size_t points,
                               ConfMode mode) {
  check_inputs(instance, schedule);
  const DemandBounds bounds(instance);
  const double B = static_cast<double>(instance.budget);
  const double nbar = bounds.n_bar();
  const double top = B / nbar;
  std::vector<XGridPoint> out;
  if (points < 2) points = 2;
  out.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = top * static_cast<double>(i) / static_cast<double>(points - 1);
    const double d = delta_bar(instance, schedule, x, mode);
    out.push_back({x, d, (B - d) / nbar});
  }
  return out;
}

AnalyticBoundsReport analytic_bounds(const ProblemInstance& instance, const Schedule& schedule,
                                     std::optional<double> alpha) {
  check_inputs(instance, schedule);
  AnalyticBoundsReport rep;
  const std::size_t T = instance.horizon;
  const std::size_t B = instance.budget;
  bool unit_arrivals = instance.demand.rho_max() == 0.0;
  for (std::size_t t = 1; unit_arrivals && t <= T; ++t) {
    unit_arrivals = std::abs(instance.demand.expected_round(t) - 1.0) < 1e-12;
  }
  if (B != T || !unit_arrivals) {
    rep.reason = "bounds assume B = N = T with exactly one arrival per round";
    return rep;
  }
  if (T < 2) {
    rep.reason = "bounds need T >= 2";
    return rep;
  }
  rep.applicable = true;
  const double Td = static_cast<double>(T);
  const double delta = instance.delta;
  const auto& per = instance.perishing;

  double sufficient = 0.0;
  for (std::size_t t = 2; t <= T; ++t) {
    const long k = static_cast<long>(t) - 1;
    double mean = 0.0;
    double var = 0.0;
    std::size_t n_rand = 0;
    for (std::size_t b = 0; b < B; ++b) {
      const double c = per.cdf(b, k);
      mean += c;
      var += c * (1.0 - c);
      if (c > 0.0 && c < 1.0) ++n_rand;
    }
    const double lag = static_cast<double>(t) - mean;
    if (mean > static_cast<double>(t) - 1.0) {
      rep.necessary_condition_violated = true;
      const double floor = n_rand == 0 ? 1.0 : 0.5 - Td / std::pow(std::sqrt(var), 3.0);
      rep.infeasible_below_delta = std::max(rep.infeasible_below_delta.value_or(floor), floor);
    }
    if (n_rand > 0) {
      sufficient += std::min(var / (lag * lag), std::exp(-2.0 * lag * lag / static_cast<double>(n_rand)));
    }
  }
  if (!rep.necessary_condition_violated) rep.sufficient_delta = sufficient;

  bool all_geometric = true;
  double p = 0.0;
  for (std::size_t b = 0; b < B && all_geometric; ++b) {
    const auto* g = std::get_if<GeometricPerish>(&per.unit(b).variant());
    if (g == nullptr || (b > 0 && g->p != p)) {
      all_geometric = false;
    } else {
      p = g->p;
    }
  }
  if (all_geometric) {
    const double tp = Td * p;
    const double conf = std::log(3.0 * std::log(Td) / delta) / Td;
    rep.geometric_x_lower_bound = 1.0 - 3.0 * tp - conf;
    rep.geometric_l_perish_bound = 3.0 * tp + conf;
    rep.geometric_vacuous = tp >= 1.0 || *rep.geometric_l_perish_bound >= 1.0;
    if (tp < 1.0) rep.geometric_delta = 2.0 * std::log(Td) * tp / ((1.0 - tp) * (1.0 - tp));
  }

  if (alpha) {
    const double a = *alpha;
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1)");
    rep.alpha = a;
    const double shrink = 1.0 - std::pow(Td, -a);
    bool mean_ok = true;
    double cv_sum = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double s = std::min(Td, std::ceil(static_cast<double>(schedule.rank_of_unit(b)) / shrink));
      const double gap = per.mean(b) - s;
      if (!(gap > 0.0)) {
        mean_ok = false;
        break;
      }
      cv_sum += per.variance(b) / (gap * gap);
    }
    rep.alpha_condition_mean = mean_ok;
    rep.alpha_condition_variance = mean_ok && cv_sum <= 0.5 * std::pow(Td, 1.0 - a);
    rep.alpha_delta = 3.0 * std::log(Td) * std::exp(-std::pow(Td, 1.0 - a) / 8.0);
    rep.alpha_x_lower_bound = shrink;
  }
  return rep;
}

}  // namespace perishfair
