#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "perishfair/error.hpp"
#include "perishfair/instance_io.hpp"
#include "perishfair/toml_reader.hpp"

using namespace perishfair;

namespace {

std::string data(const std::string& name) { return std::string(PERISHFAIR_TEST_DATA) + "/" + name; }

// Message of the error raised by parsing `text`, or "" when it parses.
std::string error_of(const std::string& text, bool toml, ErrorCode* code = nullptr) {
  try {
    parse_instance(text, toml);
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "";
}

}  // namespace

TEST(InstanceIo, TomlAndJsonAgree) {
  const auto a = load_instance(data("small.toml"));
  const auto b = load_instance(data("small.json"));
  for (const auto* inst : {&a, &b}) {
    EXPECT_EQ(inst->name, "small");
    EXPECT_EQ(inst->horizon, 12u);
    EXPECT_EQ(inst->budget, 30u);
    EXPECT_DOUBLE_EQ(inst->delta, 0.1);
    EXPECT_DOUBLE_EQ(inst->envy_budget, 0.2);
    ASSERT_EQ(inst->types.size(), 2u);
    EXPECT_EQ(inst->types[1].id, "referral");
    EXPECT_DOUBLE_EQ(inst->types[1].weight, 1.5);
    EXPECT_EQ(inst->schedule.kind, ScheduleKind::kLCB);
    EXPECT_NEAR(inst->perishing.unit(0).cdf(1), 0.05, 1e-15);
    EXPECT_NEAR(inst->demand.rho_max(), 1.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(a.demand.expected_total(), b.demand.expected_total());
}

TEST(InstanceIo, NamedForm) {
  const auto inst = parse_instance("named = \"flipped_order\"\nhorizon = 7\n", true);
  EXPECT_EQ(inst.horizon, 7u);
  EXPECT_EQ(inst.budget, 7u);
  EXPECT_EQ(inst.schedule.kind, ScheduleKind::kExplicit);
  const auto g = parse_instance(R"({"named": "geometric_sweep", "horizon": 20, "alpha": 0.3, "delta": 0.2})", false);
  EXPECT_EQ(g.budget, 40u);
  EXPECT_DOUBLE_EQ(g.delta, 0.2);
  ErrorCode code{};
  error_of("named = \"nope\"\n", true, &code);
  EXPECT_EQ(code, ErrorCode::kUnknownInstance);
}

TEST(InstanceIo, ExplicitScheduleAndPerUnitLaws) {
  const std::string text = R"(
horizon = 3
budget = 3
delta = 0.05

[demand]
kind = "deterministic"
values = [1, 2, 1]

[perishing]
kind = "per_unit"
units = [
  { kind = "custom", support = [1, 3], probs = [0.5, 0.5] },
  { kind = "custom", support = [2, 4], probs = [0.5, 0.5] },
  { kind = "custom", support = [1, 2], probs = [0.5, 0.5] },
]

[schedule]
kind = "explicit"
ranks = [2, 3, 1]
)";
  const auto inst = parse_instance(text, true);
  EXPECT_EQ(inst.schedule.ranks, (std::vector<std::size_t>{2, 3, 1}));
  EXPECT_DOUBLE_EQ(inst.demand.expected_total(), 4.0);
  EXPECT_DOUBLE_EQ(inst.perishing.mean(1), 3.0);
}

TEST(InstanceIo, ErrorsNameTheKeyPath) {
  const std::string base = "horizon = 5\nbudget = 5\ndelta = 0.1\n[perishing]\nkind = \"geometric\"\np = 0.1\n";
  ErrorCode code{};
  auto msg = error_of(base + "[demand]\nkind = \"truncated_normal\"\nmean = 2.0\nsd = \"wide\"\n", true, &code);
  EXPECT_NE(msg.find("demand.sd"), std::string::npos) << msg;
  EXPECT_EQ(code, ErrorCode::kInvalidConfig);

  msg = error_of(base + "[demand]\nkind = \"truncated_normal\"\nmean = 2.0\n", true);
  EXPECT_NE(msg.find("demand.sd"), std::string::npos) << msg;

  msg = error_of(R"({"horizon": 5, "budget": 5, "delta": 0.1, "demand": {"kind": "deterministic", "value": 1},
                    "perishing": {"kind": "geometric", "p": 2.0}})",
                 false);
  EXPECT_NE(msg.find("perishing"), std::string::npos) << msg;

  msg = error_of(R"({"horizon": 5, "budget": 5, "delta": 0.1, "demand": {"kind": "deterministic", "value": 1},
                    "perishing": {"kind": "per_unit", "units": [{"kind": "geometric", "p": 0.1}]}})",
                 false);
  EXPECT_NE(msg.find("perishing.units"), std::string::npos) << msg;

  msg = error_of("horizon = -2\n", true);
  EXPECT_NE(msg.find("horizon"), std::string::npos) << msg;
}

TEST(InstanceIo, MalformedInputIsParseError) {
  ErrorCode code{};
  error_of("horizon = \n", true, &code);
  EXPECT_EQ(code, ErrorCode::kParse);
  error_of("{\"horizon\": ", false, &code);
  EXPECT_EQ(code, ErrorCode::kParse);
  try {
    load_instance(data("does_not_exist.toml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(TomlReader, Subset) {
  const auto j = parse_toml(R"(
a.b = 1
c = 'lit\n'
d = [1.5, inf, true]
[t]
x = { y = "z" }
[[arr]]
k = 1
[[arr]]
k = 2
)");
  EXPECT_EQ(j["a"]["b"], 1);
  EXPECT_EQ(j["c"], "lit\\n");
  EXPECT_TRUE(std::isinf(j["d"][1].get<double>()));
  EXPECT_EQ(j["d"][2], true);
  EXPECT_EQ(j["t"]["x"]["y"], "z");
  EXPECT_EQ(j["arr"].size(), 2u);
  EXPECT_EQ(j["arr"][1]["k"], 2);
  EXPECT_THROW(parse_toml("a = 1\na = 2\n"), Error);
  EXPECT_THROW(parse_toml("s = \"\"\"x\"\"\"\n"), Error);
}
