#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "perishfair/random.hpp"

namespace perishfair {

// ---------------------------------------------------------------------------
// Demand: per (round, type) arrival laws.
// ---------------------------------------------------------------------------

struct PointDemand {
  double value = 1.0;
};

// Normal(mean, sd^2) conditioned on [lower, upper]; sampled by inverse CDF.
struct TruncatedNormalDemand {
  double mean = 0.0;
  double sd = 1.0;
  double lower = 1.0;
  double upper = 0.0;
};

struct DiscreteDemand {
  std::vector<double> values;
  std::vector<double> probs;
};

class DemandLaw {
 public:
  using Variant = std::variant<PointDemand, TruncatedNormalDemand, DiscreteDemand>;

  DemandLaw() : law_(PointDemand{}) {}
  explicit DemandLaw(Variant law);

  const Variant& variant() const noexcept { return law_; }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  // Almost-sure bound on |N - E[N]| implied by the support.
  double rho() const noexcept { return rho_; }
  double support_min() const noexcept { return min_; }
  double support_max() const noexcept { return max_; }

  double sample(Rng& rng) const;

 private:
  Variant law_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double rho_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// Moments of Normal(mean, sd^2) truncated to [lower, upper].
double truncated_normal_mean(double mean, double sd, double lower, double upper);
double truncated_normal_variance(double mean, double sd, double lower, double upper);

enum class DemandKind { kDeterministic, kTruncatedNormal, kCustom };

class DemandSpec {
 public:
  DemandSpec() = default;

  // table[t][theta], rounds 0-based in storage. Every round must total >= 1.
  static DemandSpec deterministic(const std::vector<std::vector<double>>& table);
  // Same truncated normal for every (round, type). lower >= 1 keeps N_t >= 1.
  static DemandSpec truncated_normal(std::size_t horizon, std::size_t n_types, double mean,
                                     double sd, double lower, double upper);
  // Default truncation [1, mean + 6 sd].
  static DemandSpec truncated_normal(std::size_t horizon, std::size_t n_types, double mean,
                                     double sd);
  static DemandSpec custom(std::size_t horizon, std::size_t n_types, std::vector<double> values,
                           std::vector<double> probs);

  DemandKind kind() const noexcept { return kind_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t n_types() const noexcept { return n_types_; }
  bool round_arrivals() const noexcept { return round_arrivals_; }
  void set_round_arrivals(bool on) noexcept { round_arrivals_ = on; }

  // Rounds are 1-based in the accessors below.
  const DemandLaw& law(std::size_t t, std::size_t theta) const;
  double expected(std::size_t t, std::size_t theta) const { return law(t, theta).mean(); }
  double rho(std::size_t t, std::size_t theta) const { return law(t, theta).rho(); }
  double expected_round(std::size_t t) const;
  double expected_total() const;
  double rho_max() const;
  double mu_max() const;

  double sample(std::size_t t, std::size_t theta, Rng& rng) const;

 private:
  DemandSpec(DemandKind kind, std::size_t horizon, std::size_t n_types,
             std::vector<DemandLaw> cells);

  DemandKind kind_ = DemandKind::kDeterministic;
  std::size_t horizon_ = 0;
  std::size_t n_types_ = 0;
  bool round_arrivals_ = false;
  std::vector<DemandLaw> cells_;  // row-major (round, type)
};

// ---------------------------------------------------------------------------
// Perishing: per-unit laws over positive integer rounds.
// ---------------------------------------------------------------------------

struct DeterministicPerish {
  long time = 1;
};

struct GeometricPerish {
  double p = 0.5;
};

// Discrete uniform on {lo, ..., hi}.
struct UniformIntPerish {
  long lo = 1;
  long hi = 1;
};

// Arbitrary pmf on positive integers. Also backs the rounded continuous
// uniform used by the front/back-loaded families.
struct CustomPerish {
  std::vector<long> support;
  std::vector<double> probs;
};

enum class PerishKind {
  kDeterministic,
  kGeometric,
  kUniformInt,
  kPointMassAfterHorizon,
  kCustom,
  kRoundedUniform,
};

class PerishLaw {
 public:
  using Variant = std::variant<DeterministicPerish, GeometricPerish, UniformIntPerish, CustomPerish>;

  PerishLaw() : PerishLaw(DeterministicPerish{}) {}
  explicit PerishLaw(DeterministicPerish law);
  explicit PerishLaw(GeometricPerish law);
  explicit PerishLaw(UniformIntPerish law);
  explicit PerishLaw(CustomPerish law);

  // Point mass at horizon + 1: never perishes inside the horizon.
  static PerishLaw after_horizon(std::size_t horizon);
  // Uniform(lo, hi) rounded to the nearest integer and floored at 1.
  static PerishLaw rounded_uniform(double lo, double hi);

  PerishKind kind() const noexcept { return kind_; }
  const Variant& variant() const noexcept { return law_; }
  // Parameters of a rounded uniform, when kind() == kRoundedUniform.
  double uniform_lo() const noexcept { return uniform_lo_; }
  double uniform_hi() const noexcept { return uniform_hi_; }

  // Pr(T_b <= k); 0 for k <= 0.
  double cdf(long k) const;
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  long sample(Rng& rng) const;

 private:
  PerishLaw(Variant law, PerishKind kind);

  Variant law_;
  PerishKind kind_ = PerishKind::kDeterministic;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double uniform_lo_ = 0.0;
  double uniform_hi_ = 0.0;
  std::vector<double> cumulative_;  // custom pmf only
};

class PerishingSpec {
 public:
  PerishingSpec() = default;
  explicit PerishingSpec(std::vector<PerishLaw> units);
  static PerishingSpec iid(const PerishLaw& law, std::size_t budget);

  std::size_t size() const noexcept { return units_.size(); }
  // Units are 0-based.
  const PerishLaw& unit(std::size_t b) const { return units_.at(b); }
  double cdf(std::size_t b, long k) const { return units_[b].cdf(k); }
  double mean(std::size_t b) const { return units_[b].mean(); }
  double variance(std::size_t b) const { return units_[b].variance(); }
  long sample(std::size_t b, Rng& rng) const { return units_[b].sample(rng); }
  bool identically_distributed() const noexcept { return iid_; }

 private:
  std::vector<PerishLaw> units_;
  bool iid_ = false;
};

}  // namespace perishfair
