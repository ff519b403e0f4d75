#pragma once

#include <cstddef>
#include <vector>

#include "perishfair/core.hpp"

namespace perishfair {

// Hoeffding width for arrivals in rounds (t, t']:
// sqrt(2 (t' - t) |Theta| rho_max^2 log(2 T^2 / delta)). Zero when t' == t.
double conf_n(std::size_t t, std::size_t t_prime, std::size_t n_types, double rho_max, std::size_t horizon,
              double delta);

// Chernoff width on perishing counts with mean eta at round t:
// (L + sqrt(L^2 + 8 eta L)) / 2, L = log(3 t log T / delta).
// For T = 1 the log log term is dropped: L = log(3 t / delta).
double conf_p(std::size_t t, double eta, std::size_t horizon, double delta);

// The epsilon solving eps^2 mu / (2 + eps) = log(1/delta).
double chernoff_epsilon(double mu, double delta);

// Arrival forecasts for one instance, with prefix sums of E[N_t] cached.
class DemandBounds {
 public:
  explicit DemandBounds(const ProblemInstance& instance);

  std::size_t horizon() const noexcept { return horizon_; }
  double delta() const noexcept { return delta_; }

  // E[N_{[t, t']}], 1 <= t, t' <= T; zero for an empty window.
  double expected(std::size_t t, std::size_t t_prime) const;
  // Conf^N_{t, t'}.
  double conf(std::size_t t, std::size_t t_prime) const;
  // max(0, E[N_{[t, t']}] - Conf^N_{t-1, t'}); zero for t' < t.
  double lower(std::size_t t, std::size_t t_prime) const;
  // N-bar = E[N] + Conf^N_{0, T}.
  double n_bar() const;
  // E[N_{>t}] + Conf^N_{t, T}.
  double upper_after(std::size_t t) const;

 private:
  std::size_t horizon_;
  std::size_t n_types_;
  double rho_max_;
  double delta_;
  std::vector<double> prefix_;  // prefix_[t] = E[N_{<=t}]
};

double n_lower(const ProblemInstance& instance, std::size_t t, std::size_t t_prime);

}  // namespace perishfair
