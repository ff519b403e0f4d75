#include "perishfair/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidDelta, "delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

}  // namespace

double conf_n(std::size_t t, std::size_t t_prime, std::size_t n_types, double rho_max, std::size_t horizon,
              double delta) {
  check_delta(delta);
  if (t_prime <= t) return 0.0;
  const double T = static_cast<double>(horizon);
  return std::sqrt(2.0 * static_cast<double>(t_prime - t) * static_cast<double>(n_types) * rho_max * rho_max *
                   std::log(2.0 * T * T / delta));
}

double conf_p(std::size_t t, double eta, std::size_t horizon, double delta) {
  check_delta(delta);
  if (t < 1) throw Error(ErrorCode::kInvalidInput, "conf_p needs t >= 1");
  const double td = static_cast<double>(t);
  const double l = horizon >= 2 ? std::log(3.0 * td * std::log(static_cast<double>(horizon)) / delta)
                                : std::log(3.0 * td / delta);
  return 0.5 * (l + std::sqrt(l * l + 8.0 * std::max(0.0, eta) * l));
}

double chernoff_epsilon(double mu, double delta) {
  check_delta(delta);
  if (!(mu > 0.0)) throw Error(ErrorCode::kInvalidMean, "chernoff_epsilon needs mu > 0");
  const double l = -std::log(delta);
  return (l + std::sqrt(l * l + 8.0 * mu * l)) / (2.0 * mu);
}

DemandBounds::DemandBounds(const ProblemInstance& instance)
    : horizon_(instance.horizon),
      n_types_(instance.types.size()),
      rho_max_(instance.demand.rho_max()),
      delta_(instance.delta),
      prefix_(instance.horizon + 1, 0.0) {
  check_delta(delta_);
  for (std::size_t t = 1; t <= horizon_; ++t) prefix_[t] = prefix_[t - 1] + instance.demand.expected_round(t);
}

double DemandBounds::expected(std::size_t t, std::size_t t_prime) const {
  if (t_prime < t) return 0.0;
  return prefix_[t_prime] - prefix_[t - 1];
}

double DemandBounds::conf(std::size_t t, std::size_t t_prime) const {
  return conf_n(t, t_prime, n_types_, rho_max_, horizon_, delta_);
}

double DemandBounds::lower(std::size_t t, std::size_t t_prime) const {
  if (t_prime < t) return 0.0;
  return std::max(0.0, expected(t, t_prime) - conf(t - 1, t_prime));
}

double DemandBounds::n_bar() const { return prefix_[horizon_] + conf(0, horizon_); }

double DemandBounds::upper_after(std::size_t t) const {
  return (prefix_[horizon_] - prefix_[t]) + conf(t, horizon_);
}

double n_lower(const ProblemInstance& instance, std::size_t t, std::size_t t_prime) {
  return DemandBounds(instance).lower(t, t_prime);
}

}  // namespace perishfair
