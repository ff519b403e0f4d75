#include "perishfair/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

constexpr double kTol = 1e-9;

}  // namespace

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::kDepleted: return "depleted";
    case Branch::kUpper: return "upper";
    case Branch::kLower: return "lower";
  }
  return "?";
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kPerishingGuardrail: return "perishing_guardrail";
    case PolicyKind::kVanillaGuardrail: return "vanilla_guardrail";
    case PolicyKind::kStaticXLower: return "static_x_lower";
    case PolicyKind::kStaticProportional: return "static_proportional";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "perishing_guardrail" || s == "pg" || s == "perishing") return PolicyKind::kPerishingGuardrail;
  if (s == "vanilla_guardrail" || s == "vanilla") return PolicyKind::kVanillaGuardrail;
  if (s == "static_x_lower" || s == "static_xlower") return PolicyKind::kStaticXLower;
  if (s == "static_proportional" || s == "static_b_nbar" || s == "static") return PolicyKind::kStaticProportional;
  throw Error(ErrorCode::kInvalidConfig, "unknown policy '" + name + "'");
}

// ---------------------------------------------------------------------------

InventoryState::InventoryState(std::size_t budget)
    : remaining_(budget, 1.0), budget_(static_cast<double>(budget)) {}

std::vector<std::pair<std::size_t, double>> InventoryState::allocate(const Schedule& schedule, double quantity) {
  if (quantity < 0.0) throw Error(ErrorCode::kInvalidInput, "negative allocation");
  if (quantity > budget_ + kTol) {
    throw Error(ErrorCode::kOverdraw,
                "allocation " + std::to_string(quantity) + " exceeds remaining budget " + std::to_string(budget_));
  }
  std::vector<std::pair<std::size_t, double>> taken;
  double left = quantity;
  const std::size_t n = remaining_.size();
  while (left > 0.0 && cursor_ <= n) {
    const std::size_t b = schedule.unit_at_rank(cursor_);
    double& rem = remaining_[b];
    if (rem <= 0.0) {
      ++cursor_;
      continue;
    }
    const double take = std::min(rem, left);
    taken.emplace_back(b, take);
    left -= take;
    rem -= take;
    if (rem <= kTol * 1e-3) {
      // Count the residue as allocated so the unit does not linger.
      left -= rem;
      rem = 0.0;
      ++cursor_;
    }
  }
  budget_ = std::max(0.0, budget_ - quantity);
  if (cursor_ > n) budget_ = 0.0;
  return taken;
}

std::pair<double, std::vector<std::size_t>> InventoryState::perish(const SamplePath& path, std::size_t t) {
  double pua = 0.0;
  std::vector<std::size_t> spoiled;
  for (const std::size_t* it = path.perishing_begin(t); it != path.perishing_end(t); ++it) {
    double& rem = remaining_[*it];
    if (rem > 0.0) {
      pua += rem;
      rem = 0.0;
      spoiled.push_back(*it);
    }
  }
  budget_ = std::max(0.0, budget_ - pua);
  return {pua, std::move(spoiled)};
}

std::vector<std::pair<std::size_t, double>> allocate_round(InventoryState& state, const Schedule& schedule,
                                                           double quantity) {
  return state.allocate(schedule, quantity);
}

std::pair<double, std::vector<std::size_t>> apply_perishing(InventoryState& state, const SamplePath& path,
                                                            std::size_t t) {
  return state.perish(path, t);
}

// ---------------------------------------------------------------------------

Policy make_policy(PolicyKind kind, const GuardrailPlan& plan) {
  Policy p;
  p.kind = kind;
  p.n_upper_after = plan.n_upper_after;
  switch (kind) {
    case PolicyKind::kPerishingGuardrail:
      p.lower = plan.x_lower;
      p.upper = plan.x_upper;
      p.p_bar = plan.p_bar;
      break;
    case PolicyKind::kVanillaGuardrail:
      p.lower = plan.baseline;
      p.upper = plan.baseline + plan.envy_budget;
      p.p_bar.assign(plan.p_bar.size(), 0.0);
      break;
    case PolicyKind::kStaticXLower:
      p.lower = p.upper = plan.x_lower;
      break;
    case PolicyKind::kStaticProportional:
      p.lower = p.upper = plan.baseline;
      break;
  }
  return p;
}

Policy make_static_policy(double target) {
  Policy p;
  p.kind = PolicyKind::kStaticProportional;
  p.lower = p.upper = target;
  return p;
}

Decision step_policy(const Policy& policy, double budget, std::size_t t, double n_t) {
  if (!(n_t > 0.0)) throw Error(ErrorCode::kInvalidInput, "round needs positive arrivals");
  const double floor_need = n_t * policy.lower;
  if (budget <= 0.0 || budget < floor_need - kTol) {
    return {std::max(0.0, budget) / n_t, Branch::kDepleted};
  }
  const double floor_x = std::min(policy.lower, budget / n_t);
  if (policy.kind == PolicyKind::kStaticXLower || policy.kind == PolicyKind::kStaticProportional) {
    return {floor_x, Branch::kLower};
  }
  if (t < 1 || t > policy.p_bar.size() || t > policy.n_upper_after.size()) {
    throw Error(ErrorCode::kInvalidInput, "round outside the policy's forecast tables");
  }
  const double reserve = policy.lower * policy.n_upper_after[t - 1] + policy.p_bar[t - 1];
  if (budget - n_t * policy.upper >= reserve) return {policy.upper, Branch::kUpper};
  return {floor_x, Branch::kLower};
}

// ---------------------------------------------------------------------------

bool Trajectory::stockout() const {
  return std::any_of(rounds.begin(), rounds.end(), [](const RoundRecord& r) { return r.branch == Branch::kDepleted; });
}

double Trajectory::total_allocated() const {
  double s = 0.0;
  for (const auto& r : rounds) s += r.n_t * r.x_t;
  return s;
}

double Trajectory::total_spoilage() const {
  double s = 0.0;
  for (const auto& r : rounds) s += r.pua;
  return s;
}

PathRunner::PathRunner(const ProblemInstance& instance, const Schedule& schedule, const Policy& policy,
                       const SamplePath& path)
    : schedule_(schedule), policy_(policy), path_(path), horizon_(instance.horizon), state_(instance.budget) {
  if (schedule.size() != instance.budget || path.budget() != instance.budget || path.horizon() != instance.horizon) {
    throw Error(ErrorCode::kInvalidInput, "instance, schedule and path disagree on B or T");
  }
  traj_.initial_budget = static_cast<double>(instance.budget);
  traj_.rounds.reserve(horizon_);
}

const RoundRecord& PathRunner::step() {
  if (done()) throw Error(ErrorCode::kInvalidInput, "path already finished");
  RoundRecord rec;
  rec.round = t_;
  rec.n_t = path_.round_total(t_);
  rec.budget_before = state_.budget();
  const Decision d = step_policy(policy_, rec.budget_before, t_, rec.n_t);
  rec.branch = d.branch;
  rec.x_t = d.x;
  const double quantity = std::min(d.x * rec.n_t, state_.budget());
  state_.allocate(schedule_, quantity);
  auto [pua, spoiled] = state_.perish(path_, t_);
  rec.pua = pua;
  rec.spoiled_units = std::move(spoiled);
  traj_.rounds.push_back(std::move(rec));
  ++t_;
  return traj_.rounds.back();
}

Trajectory PathRunner::finish() {
  while (!done()) step();
  traj_.leftover = state_.budget();
  return std::move(traj_);
}

Trajectory run_path(const ProblemInstance& instance, const Schedule& schedule, const Policy& policy,
                    const SamplePath& path) {
  PathRunner runner(instance, schedule, policy, path);
  return runner.finish();
}

}  // namespace perishfair
