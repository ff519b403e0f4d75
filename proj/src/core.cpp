#include "perishfair/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "perishfair/error.hpp"

namespace perishfair {

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kIdentity: return "identity";
    case ScheduleKind::kMean: return "mean";
    case ScheduleKind::kCV: return "cv";
    case ScheduleKind::kLCB: return "lcb";
    case ScheduleKind::kExplicit: return "explicit";
    case ScheduleKind::kHindsightOptimal: return "hindsight";
  }
  return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "identity") return ScheduleKind::kIdentity;
  if (s == "mean") return ScheduleKind::kMean;
  if (s == "cv") return ScheduleKind::kCV;
  if (s == "lcb") return ScheduleKind::kLCB;
  if (s == "explicit") return ScheduleKind::kExplicit;
  if (s == "hindsight" || s == "hindsight_optimal") return ScheduleKind::kHindsightOptimal;
  throw Error(ErrorCode::kInvalidSchedule, "unknown schedule kind '" + name + "'");
}

void ProblemInstance::validate() const {
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  if (budget < 1) throw Error(ErrorCode::kInvalidConfig, "budget must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidDelta, "delta must lie in (0, 1)");
  if (!(envy_budget >= 0.0) || !std::isfinite(envy_budget)) {
    throw Error(ErrorCode::kInvalidConfig, "envy_budget must be finite and >= 0");
  }
  if (types.empty()) throw Error(ErrorCode::kInvalidConfig, "at least one type is required");
  std::set<std::string> ids;
  for (const auto& ty : types) {
    if (!(ty.weight > 0.0)) throw Error(ErrorCode::kInvalidConfig, "type '" + ty.id + "' has weight <= 0");
    if (!ids.insert(ty.id).second) throw Error(ErrorCode::kInvalidConfig, "duplicate type id '" + ty.id + "'");
  }
  if (demand.horizon() != horizon) {
    throw Error(ErrorCode::kInvalidConfig, "demand horizon does not match instance horizon");
  }
  if (demand.n_types() != types.size()) {
    throw Error(ErrorCode::kInvalidConfig, "demand type count does not match types");
  }
  if (perishing.size() != budget) {
    throw Error(ErrorCode::kInvalidConfig, "perishing spec must describe exactly `budget` units");
  }
  const double n = demand.expected_total();
  if (!(n > 0.0) || !std::isfinite(budget / n)) {
    throw Error(ErrorCode::kInvalidConfig, "expected total demand must be positive");
  }
  if (schedule.kind == ScheduleKind::kExplicit && schedule.ranks.size() != budget) {
    throw Error(ErrorCode::kInvalidSchedule, "explicit schedule must rank every unit");
  }
}

double ProblemInstance::max_weight() const {
  double w = 0.0;
  for (const auto& ty : types) w = std::max(w, ty.weight);
  return w;
}

// ---------------------------------------------------------------------------

Schedule::Schedule(std::vector<std::size_t> ranks) : rank_of_unit_(std::move(ranks)) {
  const std::size_t n = rank_of_unit_.size();
  unit_at_rank_.assign(n, n);
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t r = rank_of_unit_[b];
    if (r < 1 || r > n || unit_at_rank_[r - 1] != n) {
      throw Error(ErrorCode::kInvalidSchedule,
                  "ranks are not a permutation of 1.." + std::to_string(n) + " (unit " + std::to_string(b + 1) + ")");
    }
    unit_at_rank_[r - 1] = b;
  }
}

Schedule Schedule::identity(std::size_t budget) {
  std::vector<std::size_t> ranks(budget);
  std::iota(ranks.begin(), ranks.end(), std::size_t{1});
  return Schedule(std::move(ranks));
}

// ---------------------------------------------------------------------------

SamplePath::SamplePath(std::size_t horizon, std::size_t n_types, std::vector<double> arrivals,
                       std::vector<long> perish_time, std::uint64_t seed)
    : horizon_(horizon),
      n_types_(n_types),
      seed_(seed),
      arrivals_(std::move(arrivals)),
      perish_time_(std::move(perish_time)) {
  if (horizon_ == 0 || n_types_ == 0 || arrivals_.size() != horizon_ * n_types_) {
    throw Error(ErrorCode::kInvalidInput, "arrival matrix does not match horizon x types");
  }
  round_totals_.assign(horizon_, 0.0);
  prefix_.assign(horizon_ + 1, 0.0);
  for (std::size_t t = 0; t < horizon_; ++t) {
    double s = 0.0;
    for (std::size_t th = 0; th < n_types_; ++th) {
      const double a = arrivals_[t * n_types_ + th];
      if (!(a >= 0.0)) throw Error(ErrorCode::kInvalidInput, "negative arrivals");
      s += a;
    }
    if (s < 1.0 - 1e-12) {
      throw Error(ErrorCode::kInvalidInput, "round " + std::to_string(t + 1) + " has fewer than one arrival");
    }
    round_totals_[t] = s;
    prefix_[t + 1] = prefix_[t] + s;
  }
  total_ = prefix_[horizon_];

  offsets_.assign(horizon_ + 1, 0);
  for (long tb : perish_time_) {
    if (tb < 1) throw Error(ErrorCode::kInvalidInput, "perishing times must be >= 1");
    if (tb <= static_cast<long>(horizon_)) ++offsets_[static_cast<std::size_t>(tb)];
  }
  for (std::size_t t = 1; t <= horizon_; ++t) offsets_[t] += offsets_[t - 1];
  by_time_.resize(offsets_[horizon_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t b = 0; b < perish_time_.size(); ++b) {
    const long tb = perish_time_[b];
    if (tb <= static_cast<long>(horizon_)) by_time_[fill[static_cast<std::size_t>(tb) - 1]++] = b;
  }
}

// ---------------------------------------------------------------------------

namespace {

// Keys are snapped so that analytically equal moments computed along
// different floating-point paths compare equal and fall to the tie-break.
double snap(double key) { return std::round(key * 1e9) / 1e9; }

Schedule order_by_key(const std::vector<double>& key, std::uint64_t seed) {
  const std::size_t n = key.size();
  std::vector<std::size_t> units(n);
  std::iota(units.begin(), units.end(), std::size_t{0});
  Rng rng(stream_seed(seed, Stream::kSchedule));
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(units[i - 1], units[j]);
  }
  std::stable_sort(units.begin(), units.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<std::size_t> ranks(n);
  for (std::size_t r = 0; r < n; ++r) ranks[units[r]] = r + 1;
  return Schedule(std::move(ranks));
}

}  // namespace

Schedule build_schedule(const ScheduleSpec& spec, const PerishingSpec& perishing, std::uint64_t seed,
                        const SamplePath* path) {
  const std::size_t n = perishing.size();
  std::vector<double> key(n);
  switch (spec.kind) {
    case ScheduleKind::kIdentity:
      return Schedule::identity(n);
    case ScheduleKind::kExplicit:
      if (spec.ranks.size() != n) {
        throw Error(ErrorCode::kInvalidSchedule, "explicit schedule has " + std::to_string(spec.ranks.size()) +
                                                     " ranks for " + std::to_string(n) + " units");
      }
      return Schedule(spec.ranks);
    case ScheduleKind::kMean:
      for (std::size_t b = 0; b < n; ++b) key[b] = snap(perishing.mean(b));
      break;
    case ScheduleKind::kCV:
      // Decreasing coefficient of variation.
      for (std::size_t b = 0; b < n; ++b) {
        key[b] = -snap(std::sqrt(perishing.variance(b)) / perishing.mean(b));
      }
      break;
    case ScheduleKind::kLCB:
      for (std::size_t b = 0; b < n; ++b) {
        key[b] = snap(perishing.mean(b) - 1.96 * std::sqrt(perishing.variance(b)));
      }
      break;
    case ScheduleKind::kHindsightOptimal:
      if (path == nullptr) {
        throw Error(ErrorCode::kMissingPath, "hindsight-optimal schedule needs a sample path");
      }
      if (path->budget() != n) {
        throw Error(ErrorCode::kInvalidInput, "sample path unit count does not match perishing spec");
      }
      for (std::size_t b = 0; b < n; ++b) key[b] = static_cast<double>(path->perish_time(b));
      break;
  }
  return order_by_key(key, seed);
}

SamplePath sample_path(const ProblemInstance& instance, std::uint64_t seed) {
  const std::size_t T = instance.horizon;
  const std::size_t K = instance.types.size();
  Rng demand_rng(stream_seed(seed, Stream::kDemand));
  std::vector<double> arrivals(T * K);
  for (std::size_t t = 1; t <= T; ++t) {
    for (std::size_t th = 0; th < K; ++th) {
      arrivals[(t - 1) * K + th] = instance.demand.sample(t, th, demand_rng);
    }
  }
  Rng perish_rng(stream_seed(seed, Stream::kPerishing));
  std::vector<long> perish(instance.budget);
  for (std::size_t b = 0; b < instance.budget; ++b) perish[b] = instance.perishing.sample(b, perish_rng);
  return SamplePath(T, K, std::move(arrivals), std::move(perish), seed);
}

}  // namespace perishfair
