#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "perishfair/core.hpp"
#include "perishfair/guardrail.hpp"

namespace perishfair {

enum class Branch { kDepleted, kUpper, kLower };
const char* to_string(Branch branch);

enum class PolicyKind { kPerishingGuardrail, kVanillaGuardrail, kStaticXLower, kStaticProportional };
const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

// Remaining fraction of every unit, consumed in schedule order.
class InventoryState {
 public:
  InventoryState() = default;
  explicit InventoryState(std::size_t budget);

  double budget() const noexcept { return budget_; }
  double remaining(std::size_t b) const { return remaining_[b]; }
  const std::vector<double>& remaining() const noexcept { return remaining_; }
  // Lowest rank that may still hold stock (1-based; size()+1 once empty).
  std::size_t cursor() const noexcept { return cursor_; }

  // Consumes `quantity` in increasing rank. Returns (unit, amount) pairs.
  std::vector<std::pair<std::size_t, double>> allocate(const Schedule& schedule, double quantity);
  // Drops every unit perishing at the end of round t. Returns (pua, spoiled units).
  std::pair<double, std::vector<std::size_t>> perish(const SamplePath& path, std::size_t t);

 private:
  std::vector<double> remaining_;
  double budget_ = 0.0;
  std::size_t cursor_ = 1;
};

std::vector<std::pair<std::size_t, double>> allocate_round(InventoryState& state, const Schedule& schedule,
                                                           double quantity);
std::pair<double, std::vector<std::size_t>> apply_perishing(InventoryState& state, const SamplePath& path,
                                                            std::size_t t);

struct Policy {
  PolicyKind kind = PolicyKind::kPerishingGuardrail;
  double lower = 0.0;  // guardrail floor, or the static target
  double upper = 0.0;
  std::vector<double> p_bar;          // per round; zeros for the vanilla guardrail
  std::vector<double> n_upper_after;  // per round: E[N_{>t}] + Conf^N_{t,T}
};

Policy make_policy(PolicyKind kind, const GuardrailPlan& plan);
// Static policy with an arbitrary per-individual target.
Policy make_static_policy(double target);

struct Decision {
  double x = 0.0;
  Branch branch = Branch::kLower;
};

Decision step_policy(const Policy& policy, double budget, std::size_t t, double n_t);

struct RoundRecord {
  std::size_t round = 0;
  double n_t = 0.0;
  double x_t = 0.0;
  Branch branch = Branch::kLower;
  double budget_before = 0.0;
  double pua = 0.0;
  std::vector<std::size_t> spoiled_units;
};

struct Trajectory {
  double initial_budget = 0.0;
  std::vector<RoundRecord> rounds;
  double leftover = 0.0;

  bool stockout() const;
  double total_allocated() const;
  double total_spoilage() const;
};

// Round-by-round driver; run_path is a loop over step().
class PathRunner {
 public:
  PathRunner(const ProblemInstance& instance, const Schedule& schedule, const Policy& policy,
             const SamplePath& path);

  bool done() const noexcept { return t_ > horizon_; }
  std::size_t next_round() const noexcept { return t_; }
  const InventoryState& state() const noexcept { return state_; }
  const RoundRecord& step();
  Trajectory finish();

 private:
  const Schedule& schedule_;
  const Policy& policy_;
  const SamplePath& path_;
  std::size_t horizon_;
  std::size_t t_ = 1;
  InventoryState state_;
  Trajectory traj_;
};

Trajectory run_path(const ProblemInstance& instance, const Schedule& schedule, const Policy& policy,
                    const SamplePath& path);

}  // namespace perishfair
