#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "perishfair/distributions.hpp"

namespace perishfair {

struct TypeProfile {
  std::string id;
  double weight = 1.0;
};

enum class ScheduleKind { kIdentity, kMean, kCV, kLCB, kExplicit, kHindsightOptimal };

const char* to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kIdentity;
  // Explicit only: ranks[b] is the 1-based rank of unit b.
  std::vector<std::size_t> ranks;
};

struct ProblemInstance {
  std::string name;
  std::size_t horizon = 0;  // T
  std::size_t budget = 0;   // B
  std::vector<TypeProfile> types;
  DemandSpec demand;
  PerishingSpec perishing;
  ScheduleSpec schedule;
  double delta = 0.05;
  double envy_budget = 0.0;  // L_T

  // Throws InvalidConfig on the first violated invariant.
  void validate() const;

  double max_weight() const;
  double expected_total_demand() const { return demand.expected_total(); }
};

// Units are 0-based; ranks are 1-based, as in the allocation order itself.
class Schedule {
 public:
  Schedule() = default;
  // ranks[b] = rank of unit b. Throws InvalidSchedule unless ranks is a
  // permutation of 1..B.
  explicit Schedule(std::vector<std::size_t> ranks);
  static Schedule identity(std::size_t budget);

  std::size_t size() const noexcept { return rank_of_unit_.size(); }
  std::size_t rank_of_unit(std::size_t b) const { return rank_of_unit_[b]; }
  std::size_t unit_at_rank(std::size_t r) const { return unit_at_rank_[r - 1]; }
  const std::vector<std::size_t>& ranks() const noexcept { return rank_of_unit_; }
  const std::vector<std::size_t>& order() const noexcept { return unit_at_rank_; }

  bool operator==(const Schedule& other) const { return rank_of_unit_ == other.rank_of_unit_; }

 private:
  std::vector<std::size_t> rank_of_unit_;
  std::vector<std::size_t> unit_at_rank_;
};

class SamplePath {
 public:
  SamplePath() = default;
  SamplePath(std::size_t horizon, std::size_t n_types, std::vector<double> arrivals,
             std::vector<long> perish_time, std::uint64_t seed);

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t n_types() const noexcept { return n_types_; }
  std::size_t budget() const noexcept { return perish_time_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }

  // Rounds are 1-based.
  double arrivals(std::size_t t, std::size_t theta) const {
    return arrivals_[(t - 1) * n_types_ + theta];
  }
  double round_total(std::size_t t) const { return round_totals_[t - 1]; }
  double total_arrivals() const noexcept { return total_; }
  // N_{<t}.
  double arrivals_before(std::size_t t) const { return prefix_[t - 1]; }
  long perish_time(std::size_t b) const { return perish_time_[b]; }
  const std::vector<long>& perish_times() const noexcept { return perish_time_; }
  const std::vector<double>& arrival_matrix() const noexcept { return arrivals_; }

  // Units whose perishing time equals t (t in 1..T).
  const std::size_t* perishing_begin(std::size_t t) const { return by_time_.data() + offsets_[t - 1]; }
  const std::size_t* perishing_end(std::size_t t) const { return by_time_.data() + offsets_[t]; }
  std::size_t perishing_count(std::size_t t) const { return offsets_[t] - offsets_[t - 1]; }
  // P_{<t}.
  std::size_t perished_before(std::size_t t) const { return offsets_[t - 1]; }

  bool operator==(const SamplePath& other) const {
    return horizon_ == other.horizon_ && n_types_ == other.n_types_ && seed_ == other.seed_ &&
           arrivals_ == other.arrivals_ && perish_time_ == other.perish_time_;
  }

 private:
  std::size_t horizon_ = 0;
  std::size_t n_types_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> arrivals_;  // row-major (round, type)
  std::vector<double> round_totals_;
  std::vector<double> prefix_;  // prefix_[t-1] = N_{<t}, size T+1
  double total_ = 0.0;
  std::vector<long> perish_time_;
  std::vector<std::size_t> by_time_;  // units sorted by perish time within the horizon
  std::vector<std::size_t> offsets_;  // size T+1
};

// Ties in the ordering key are broken by a shuffle drawn from the schedule
// stream of `seed`. HindsightOptimal needs `path`.
Schedule build_schedule(const ScheduleSpec& spec, const PerishingSpec& perishing, std::uint64_t seed,
                        const SamplePath* path = nullptr);

// Arrivals come from the demand stream of `seed`, perishing times from the
// perishing stream.
SamplePath sample_path(const ProblemInstance& instance, std::uint64_t seed);

}  // namespace perishfair
