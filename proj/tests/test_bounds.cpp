#include <cmath>

#include <gtest/gtest.h>

#include "perishfair/bounds.hpp"
#include "perishfair/error.hpp"
#include "perishfair/harness.hpp"

using namespace perishfair;

// Reference values below were evaluated with mpmath at 40 digits.

TEST(ConfN, ZeroDeviation) { EXPECT_EQ(conf_n(3, 4, 1, 0.0, 10, 0.1), 0.0); }

TEST(ConfN, ReferenceValue) {
  EXPECT_NEAR(conf_n(0, 100, 1, 1.0, 100, 0.01), 53.86772268905419286, 1e-10);
}

TEST(ConfN, MonotoneInWindow) {
  EXPECT_LT(conf_n(0, 50, 2, 0.5, 100, 0.05), conf_n(0, 100, 2, 0.5, 100, 0.05));
  EXPECT_EQ(conf_n(5, 5, 2, 0.5, 100, 0.05), 0.0);
}

TEST(ConfN, RejectsBadDelta) {
  for (double d : {0.0, 1.0, -0.1, 2.0}) {
    try {
      conf_n(0, 1, 1, 1.0, 10, d);
      ADD_FAILURE() << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDelta);
    }
  }
}

TEST(ConfP, EtaZeroIsLog) {
  EXPECT_NEAR(conf_p(2, 0.0, 50, 0.1), std::log(3.0 * 2 * std::log(50.0) / 0.1), 1e-12);
}

TEST(ConfP, ReferenceValue) { EXPECT_NEAR(conf_p(1, 10.0, 100, 0.01), 16.17298658412966106, 1e-10); }

TEST(ConfP, SingleRoundHorizon) { EXPECT_NEAR(conf_p(1, 0.0, 1, 0.5), std::log(6.0), 1e-12); }

TEST(ConfP, StrictlyIncreasingAndConcave) {
  double prev = conf_p(3, 0.0, 80, 0.05);
  double prev_slope = 1e300;
  for (int i = 1; i <= 200; ++i) {
    const double eta = 0.5 * i;
    const double v = conf_p(3, eta, 80, 0.05);
    const double slope = (v - prev) / 0.5;
    EXPECT_GT(v, prev);
    EXPECT_LE(slope, prev_slope + 1e-12);
    prev = v;
    prev_slope = slope;
  }
}

TEST(Chernoff, HandOracle) {
  // log(1/delta) = 1, mu = 1: eps^2 - eps - 2 = 0.
  EXPECT_NEAR(chernoff_epsilon(1.0, std::exp(-1.0)), 2.0, 1e-12);
}

TEST(Chernoff, RootFinderOracle) { EXPECT_NEAR(chernoff_epsilon(100.0, 0.05), 0.26021121582873491, 1e-12); }

TEST(Chernoff, InvertsTail) {
  for (double mu : {0.3, 1.0, 7.5, 250.0}) {
    for (double delta : {0.5, 0.05, 1e-4}) {
      const double eps = chernoff_epsilon(mu, delta);
      EXPECT_NEAR(std::exp(-eps * eps * mu / (2 + eps)) / delta, 1.0, 1e-9);
    }
  }
}

TEST(Chernoff, VanishesAsDeltaToOne) {
  EXPECT_LT(chernoff_epsilon(5.0, 1.0 - 1e-9), 1e-3);
  EXPECT_GT(chernoff_epsilon(5.0, 1.0 - 1e-9), 0.0);
}

TEST(Chernoff, RejectsNonPositiveMean) {
  try {
    chernoff_epsilon(0.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidMean);
  }
}

TEST(NLower, DeterministicRunningExample) {
  const auto inst = make_named_instance({"running_example"});
  EXPECT_DOUBLE_EQ(n_lower(inst, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(n_lower(inst, 1, 2), 3.0);
  EXPECT_DOUBLE_EQ(n_lower(inst, 1, 3), 4.0);
  EXPECT_DOUBLE_EQ(n_lower(inst, 2, 2), 2.0);
  const DemandBounds db(inst);
  EXPECT_DOUBLE_EQ(db.n_bar(), 4.0);
  EXPECT_DOUBLE_EQ(db.upper_after(1), 3.0);
}

TEST(NLower, StochasticBelowExpectation) {
  NamedInstanceParams p{"geometric_sweep", 60, 0, 0.2};
  const auto inst = make_named_instance(p);
  const DemandBounds db(inst);
  for (std::size_t t = 1; t <= 60; t += 7) {
    for (std::size_t tp = t; tp <= 60; tp += 5) {
      EXPECT_LE(db.lower(t, tp), db.expected(t, tp));
      EXPECT_GE(db.lower(t, tp), 0.0);
    }
  }
  EXPECT_LE(db.lower(1, 60), inst.expected_total_demand());
  EXPECT_NEAR(db.n_bar(), inst.expected_total_demand() + db.conf(0, 60), 1e-9);
  EXPECT_GE(db.n_bar(), inst.expected_total_demand());
}
