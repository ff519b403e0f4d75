#pragma once

#include <cstdint>
#include <random>

namespace perishfair {

// Independent sub-streams carved out of one replication seed. Demand and
// perishing never share a stream, so a schedule tie-break (or any other
// consumer) cannot shift the arrivals drawn for a replication.
enum class Stream : std::uint64_t {
  kDemand = 1,
  kPerishing = 2,
  kSchedule = 3,
  kMonteCarlo = 4,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of replication `r` under `base_seed`: mix64(mix64(base_seed) ^ mix64(r + 1)).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) noexcept;

// Seed of a named sub-stream of `seed`.
std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept;

// Thin wrapper around mt19937_64 producing platform-independent uniforms
// (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1).
  double open_uniform() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace perishfair
