#include "perishfair/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

constexpr double kPmfTolerance = 1e-9;

const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};

double std_pdf(double z) { return boost::math::pdf(kStdNormal, z); }
double std_cdf(double z) { return boost::math::cdf(kStdNormal, z); }
double std_ccdf(double z) { return boost::math::cdf(boost::math::complement(kStdNormal, z)); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_pmf(const std::vector<double>& probs, std::size_t n_values, const char* what) {
  if (probs.empty() || probs.size() != n_values) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": values and probs must be non-empty and equal length");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

double truncated_normal_mean(double mean, double sd, double lower, double upper) {
  if (sd == 0.0) return std::clamp(mean, lower, upper);
  const double a = (lower - mean) / sd;
  const double b = (upper - mean) / sd;
  // Mass computed from whichever tail is more accurate.
  const double z = (a > 0.0) ? std_ccdf(a) - std_ccdf(b) : std_cdf(b) - std_cdf(a);
  return mean + sd * (std_pdf(a) - std_pdf(b)) / z;
}

double truncated_normal_variance(double mean, double sd, double lower, double upper) {
  if (sd == 0.0) return 0.0;
  const double a = (lower - mean) / sd;
  const double b = (upper - mean) / sd;
  const double z = (a > 0.0) ? std_ccdf(a) - std_ccdf(b) : std_cdf(b) - std_cdf(a);
  const double pa = std_pdf(a);
  const double pb = std_pdf(b);
  const double shift = (pa - pb) / z;
  const double a_term = std::isfinite(a) ? a * pa : 0.0;
  const double b_term = std::isfinite(b) ? b * pb : 0.0;
  return sd * sd * (1.0 + (a_term - b_term) / z - shift * shift);
}

// ---------------------------------------------------------------------------
// DemandLaw
// ---------------------------------------------------------------------------

DemandLaw::DemandLaw(Variant law) : law_(std::move(law)) {
  std::visit(
      Overloaded{
          [&](const PointDemand& d) {
            if (!std::isfinite(d.value) || d.value < 0.0) {
              throw Error(ErrorCode::kInvalidConfig, "deterministic demand must be finite and >= 0");
            }
            mean_ = min_ = max_ = d.value;
          },
          [&](const TruncatedNormalDemand& d) {
            if (!(d.sd >= 0.0) || !std::isfinite(d.mean)) {
              throw Error(ErrorCode::kInvalidConfig, "truncated normal needs finite mean and sd >= 0");
            }
            if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper)) {
              throw Error(ErrorCode::kInvalidConfig, "truncation interval must be finite with lower < upper");
            }
            if (d.lower < 1.0) {
              throw Error(ErrorCode::kInvalidConfig, "truncation lower bound must be >= 1");
            }
            mean_ = truncated_normal_mean(d.mean, d.sd, d.lower, d.upper);
            variance_ = truncated_normal_variance(d.mean, d.sd, d.lower, d.upper);
            min_ = d.lower;
            max_ = d.upper;
          },
          [&](const DiscreteDemand& d) {
            check_pmf(d.probs, d.values.size(), "custom demand");
            double m = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              if (!std::isfinite(d.values[i]) || d.values[i] < 0.0) {
                throw Error(ErrorCode::kInvalidConfig, "custom demand values must be finite and >= 0");
              }
              m += d.values[i] * d.probs[i];
            }
            double v = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              v += d.probs[i] * (d.values[i] - m) * (d.values[i] - m);
            }
            mean_ = m;
            variance_ = v;
            min_ = std::numeric_limits<double>::infinity();
            max_ = -min_;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              if (d.probs[i] > 0.0) {
                min_ = std::min(min_, d.values[i]);
                max_ = std::max(max_, d.values[i]);
              }
            }
          },
      },
      law_);
  rho_ = std::max(mean_ - min_, max_ - mean_);
}

double DemandLaw::sample(Rng& rng) const {
  return std::visit(
      Overloaded{
          [&](const PointDemand& d) { return d.value; },
          [&](const TruncatedNormalDemand& d) {
            const double u = rng.open_uniform();
            if (d.sd == 0.0) return std::clamp(d.mean, d.lower, d.upper);
            const double a = (d.lower - d.mean) / d.sd;
            const double b = (d.upper - d.mean) / d.sd;
            double z;
            if (a > 0.0) {
              // Upper tail: invert the survival function for accuracy.
              const double sa = std_ccdf(a);
              const double sb = std_ccdf(b);
              z = boost::math::quantile(boost::math::complement(kStdNormal, sa - u * (sa - sb)));
            } else {
              const double fa = std_cdf(a);
              const double fb = std_cdf(b);
              z = boost::math::quantile(kStdNormal, fa + u * (fb - fa));
            }
            return std::clamp(d.mean + d.sd * z, d.lower, d.upper);
          },
          [&](const DiscreteDemand& d) {
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i < d.values.size(); ++i) {
              acc += d.probs[i];
              if (u < acc) return d.values[i];
            }
            return d.values.back();
          },
      },
      law_);
}

// ---------------------------------------------------------------------------
// DemandSpec
// ---------------------------------------------------------------------------

DemandSpec::DemandSpec(DemandKind kind, std::size_t horizon, std::size_t n_types,
                       std::vector<DemandLaw> cells)
    : kind_(kind), horizon_(horizon), n_types_(n_types), cells_(std::move(cells)) {
  if (horizon_ == 0 || n_types_ == 0) {
    throw Error(ErrorCode::kInvalidConfig, "demand needs horizon >= 1 and at least one type");
  }
  for (std::size_t t = 1; t <= horizon_; ++t) {
    double floor_total = 0.0;
    for (std::size_t th = 0; th < n_types_; ++th) floor_total += law(t, th).support_min();
    if (floor_total < 1.0 - 1e-12) {
      throw Error(ErrorCode::kInvalidConfig,
                  "round " + std::to_string(t) + " can see fewer than one arrival");
    }
  }
}

DemandSpec DemandSpec::deterministic(const std::vector<std::vector<double>>& table) {
  if (table.empty() || table.front().empty()) {
    throw Error(ErrorCode::kInvalidConfig, "deterministic demand table is empty");
  }
  const std::size_t n_types = table.front().size();
  std::vector<DemandLaw> cells;
  cells.reserve(table.size() * n_types);
  for (const auto& row : table) {
    if (row.size() != n_types) {
      throw Error(ErrorCode::kInvalidConfig, "deterministic demand rows must have one entry per type");
    }
    for (double v : row) cells.emplace_back(PointDemand{v});
  }
  return DemandSpec(DemandKind::kDeterministic, table.size(), n_types, std::move(cells));
}

DemandSpec DemandSpec::truncated_normal(std::size_t horizon, std::size_t n_types, double mean,
                                        double sd, double lower, double upper) {
  DemandLaw cell(TruncatedNormalDemand{mean, sd, lower, upper});
  return DemandSpec(DemandKind::kTruncatedNormal, horizon, n_types,
                    std::vector<DemandLaw>(horizon * n_types, cell));
}

DemandSpec DemandSpec::truncated_normal(std::size_t horizon, std::size_t n_types, double mean,
                                        double sd) {
  return truncated_normal(horizon, n_types, mean, sd, 1.0, mean + 6.0 * sd);
}

DemandSpec DemandSpec::custom(std::size_t horizon, std::size_t n_types, std::vector<double> values,
                              std::vector<double> probs) {
  DemandLaw cell(DiscreteDemand{std::move(values), std::move(probs)});
  return DemandSpec(DemandKind::kCustom, horizon, n_types,
                    std::vector<DemandLaw>(horizon * n_types, cell));
}

const DemandLaw& DemandSpec::law(std::size_t t, std::size_t theta) const {
  if (t < 1 || t > horizon_ || theta >= n_types_) {
    throw Error(ErrorCode::kInvalidInput, "demand cell out of range");
  }
  return cells_[(t - 1) * n_types_ + theta];
}

double DemandSpec::expected_round(std::size_t t) const {
  double s = 0.0;
  for (std::size_t th = 0; th < n_types_; ++th) s += expected(t, th);
  return s;
}

double DemandSpec::expected_total() const {
  double s = 0.0;
  for (std::size_t t = 1; t <= horizon_; ++t) s += expected_round(t);
  return s;
}

double DemandSpec::rho_max() const {
  double r = 0.0;
  for (const auto& c : cells_) r = std::max(r, c.rho());
  return r;
}

double DemandSpec::mu_max() const {
  double m = 0.0;
  for (std::size_t t = 1; t <= horizon_; ++t) m = std::max(m, expected_round(t));
  return m;
}

double DemandSpec::sample(std::size_t t, std::size_t theta, Rng& rng) const {
  const double x = law(t, theta).sample(rng);
  if (!round_arrivals_) return x;
  return std::max(1.0, std::round(x));
}

// ---------------------------------------------------------------------------
// PerishLaw
// ---------------------------------------------------------------------------

PerishLaw::PerishLaw(Variant law, PerishKind kind) : law_(std::move(law)), kind_(kind) {
  std::visit(
      Overloaded{
          [&](const DeterministicPerish& d) {
            if (d.time < 1) throw Error(ErrorCode::kInvalidConfig, "perishing time must be >= 1");
            mean_ = static_cast<double>(d.time);
            variance_ = 0.0;
          },
          [&](const GeometricPerish& g) {
            if (!(g.p > 0.0 && g.p <= 1.0)) {
              throw Error(ErrorCode::kInvalidConfig, "geometric p must lie in (0, 1]");
            }
            mean_ = 1.0 / g.p;
            variance_ = (1.0 - g.p) / (g.p * g.p);
          },
          [&](const UniformIntPerish& u) {
            if (u.lo < 1 || u.hi < u.lo) {
              throw Error(ErrorCode::kInvalidConfig, "uniform_int needs 1 <= lo <= hi");
            }
            const double n = static_cast<double>(u.hi - u.lo + 1);
            mean_ = 0.5 * static_cast<double>(u.lo + u.hi);
            variance_ = (n * n - 1.0) / 12.0;
          },
          [&](const CustomPerish& c) {
            check_pmf(c.probs, c.support.size(), "custom perishing");
            if (!std::is_sorted(c.support.begin(), c.support.end()) ||
                std::adjacent_find(c.support.begin(), c.support.end()) != c.support.end()) {
              throw Error(ErrorCode::kInvalidConfig, "custom perishing support must be strictly increasing");
            }
            if (c.support.front() < 1) {
              throw Error(ErrorCode::kInvalidConfig, "custom perishing support must be >= 1");
            }
            double m = 0.0;
            cumulative_.resize(c.probs.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < c.probs.size(); ++i) {
              m += c.probs[i] * static_cast<double>(c.support[i]);
              acc += c.probs[i];
              cumulative_[i] = acc;
            }
            cumulative_.back() = 1.0;
            double v = 0.0;
            for (std::size_t i = 0; i < c.probs.size(); ++i) {
              const double d = static_cast<double>(c.support[i]) - m;
              v += c.probs[i] * d * d;
            }
            mean_ = m;
            variance_ = v;
          },
      },
      law_);
}

PerishLaw::PerishLaw(DeterministicPerish law) : PerishLaw(Variant(law), PerishKind::kDeterministic) {}
PerishLaw::PerishLaw(GeometricPerish law) : PerishLaw(Variant(law), PerishKind::kGeometric) {}
PerishLaw::PerishLaw(UniformIntPerish law) : PerishLaw(Variant(law), PerishKind::kUniformInt) {}
PerishLaw::PerishLaw(CustomPerish law) : PerishLaw(Variant(std::move(law)), PerishKind::kCustom) {}

PerishLaw PerishLaw::after_horizon(std::size_t horizon) {
  return PerishLaw(Variant(DeterministicPerish{static_cast<long>(horizon) + 1}),
                   PerishKind::kPointMassAfterHorizon);
}

PerishLaw PerishLaw::rounded_uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw Error(ErrorCode::kInvalidConfig, "rounded uniform needs finite lo <= hi");
  }
  auto round_half_up = [](double x) { return static_cast<long>(std::floor(x + 0.5)); };
  CustomPerish pmf;
  if (hi == lo) {
    pmf.support = {std::max(1L, round_half_up(lo))};
    pmf.probs = {1.0};
  } else {
    const long kmin = round_half_up(lo);
    const long kmax = round_half_up(hi);
    const double width = hi - lo;
    double below_one = 0.0;
    for (long k = kmin; k <= kmax; ++k) {
      const double a = std::max(lo, static_cast<double>(k) - 0.5);
      const double b = std::min(hi, static_cast<double>(k) + 0.5);
      const double mass = std::max(0.0, b - a) / width;
      if (mass <= 0.0) continue;
      if (k <= 1) {
        below_one += mass;
        continue;
      }
      pmf.support.push_back(k);
      pmf.probs.push_back(mass);
    }
    if (below_one > 0.0) {
      pmf.support.insert(pmf.support.begin(), 1);
      pmf.probs.insert(pmf.probs.begin(), below_one);
    }
    // Renormalize away rounding error in the interval arithmetic.
    const double total = std::accumulate(pmf.probs.begin(), pmf.probs.end(), 0.0);
    for (double& p : pmf.probs) p /= total;
  }
  PerishLaw law(Variant(std::move(pmf)), PerishKind::kRoundedUniform);
  law.uniform_lo_ = lo;
  law.uniform_hi_ = hi;
  return law;
}

double PerishLaw::cdf(long k) const {
  if (k <= 0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const DeterministicPerish& d) { return k >= d.time ? 1.0 : 0.0; },
          [&](const GeometricPerish& g) {
            if (g.p >= 1.0) return 1.0;
            return -std::expm1(static_cast<double>(k) * std::log1p(-g.p));
          },
          [&](const UniformIntPerish& u) {
            if (k < u.lo) return 0.0;
            if (k >= u.hi) return 1.0;
            return static_cast<double>(k - u.lo + 1) / static_cast<double>(u.hi - u.lo + 1);
          },
          [&](const CustomPerish& c) {
            const auto it = std::upper_bound(c.support.begin(), c.support.end(), k);
            if (it == c.support.begin()) return 0.0;
            return cumulative_[static_cast<std::size_t>(it - c.support.begin()) - 1];
          },
      },
      law_);
}

long PerishLaw::sample(Rng& rng) const {
  return std::visit(
      Overloaded{
          [&](const DeterministicPerish& d) { return d.time; },
          [&](const GeometricPerish& g) {
            const double u = rng.open_uniform();
            if (g.p >= 1.0) return 1L;
            // Smallest k with 1 - (1-p)^k >= u.
            const double k = std::ceil(std::log1p(-u) / std::log1p(-g.p));
            if (!(k < 9.0e18)) return std::numeric_limits<long>::max();
            return std::max(1L, static_cast<long>(k));
          },
          [&](const UniformIntPerish& u) {
            return u.lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(u.hi - u.lo + 1)));
          },
          [&](const CustomPerish& c) {
            const double u = rng.uniform();
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const std::size_t i = std::min<std::size_t>(
                static_cast<std::size_t>(it - cumulative_.begin()), c.support.size() - 1);
            return c.support[i];
          },
      },
      law_);
}

// ---------------------------------------------------------------------------
// PerishingSpec
// ---------------------------------------------------------------------------

PerishingSpec::PerishingSpec(std::vector<PerishLaw> units) : units_(std::move(units)) {
  if (units_.empty()) throw Error(ErrorCode::kInvalidConfig, "perishing spec has no units");
}

PerishingSpec PerishingSpec::iid(const PerishLaw& law, std::size_t budget) {
  PerishingSpec spec(std::vector<PerishLaw>(budget, law));
  spec.iid_ = true;
  return spec;
}

}  // namespace perishfair
