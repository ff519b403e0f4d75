#include <set>

#include <gtest/gtest.h>

#include "perishfair/random.hpp"

using namespace perishfair;

// First output of the reference SplitMix64 generator seeded with 0.
TEST(Random, Mix64MatchesSplitMixReference) {
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Random, ReplicationSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(replication_seed(42, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(replication_seed(42, 7), replication_seed(42, 7));
  EXPECT_NE(replication_seed(42, 7), replication_seed(43, 7));
}

TEST(Random, StreamsAreDisjoint) {
  const std::uint64_t s = replication_seed(1, 0);
  Rng demand(stream_seed(s, Stream::kDemand));
  Rng perishing(stream_seed(s, Stream::kPerishing));
  EXPECT_NE(demand.next(), perishing.next());
  EXPECT_NE(stream_seed(s, Stream::kSchedule), stream_seed(s, Stream::kMonteCarlo));
}

TEST(Random, UniformRange) {
  Rng rng(5);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // mean 1/2, sd of the mean sqrt(1/12 / 1e5)
  EXPECT_NEAR(sum / 100000, 0.5, 3 * 0.000913);
}

TEST(Random, BelowIsInRange) {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}
