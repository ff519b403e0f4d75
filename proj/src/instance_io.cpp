#include "perishfair/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "perishfair/error.hpp"
#include "perishfair/harness.hpp"
#include "perishfair/toml_reader.hpp"

namespace perishfair {
namespace {

using nlohmann::json;

// A JSON node together with its key path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kInvalidConfig, (path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.is_object()) fail("expected a table");
    if (!j_.contains(key)) Node(json(), child_path(key)).fail("missing required key");
    return Node(j_.at(key), child_path(key));
  }
  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }

  long integer() const {
    if (j_.is_number_integer()) return j_.get<long>();
    if (j_.is_number_float()) {
      const double v = j_.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long>(v);
    }
    fail("expected an integer");
  }
  std::size_t positive() const {
    const long v = integer();
    if (v < 1) fail("expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  std::vector<double> numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
  }
  std::vector<long> integers() const {
    std::vector<long> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).integer();
    return out;
  }

 private:
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

std::string strip_code(const Error& e) {
  const std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  return msg.compare(0, prefix.size(), prefix) == 0 ? msg.substr(prefix.size()) : msg;
}

// Re-raises library errors with the key path of `n`, keeping the code.
template <class F>
auto wrap(const Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const std::string msg = strip_code(e);
    if (n.path().empty() || msg.compare(0, n.path().size(), n.path()) == 0) throw;
    throw Error(e.code(), n.path() + ": " + msg);
  }
}

DemandSpec read_demand(const Node& d, std::size_t horizon, std::size_t n_types) {
  const std::string kind = d.at("kind").string();
  return wrap(d, [&]() -> DemandSpec {
    DemandSpec spec;
    if (kind == "deterministic") {
      std::vector<std::vector<double>> table;
      if (d.has("table")) {
        const Node t = d.at("table");
        for (std::size_t r = 0; r < t.size(); ++r) table.push_back(t.at(r).numbers());
      } else if (d.has("values")) {
        for (double v : d.at("values").numbers()) table.push_back(std::vector<double>(n_types, v));
      } else {
        table.assign(horizon, std::vector<double>(n_types, d.at("value").number()));
      }
      if (table.size() != horizon) d.fail("deterministic demand needs one row per round");
      spec = DemandSpec::deterministic(table);
    } else if (kind == "truncated_normal") {
      const double mean = d.at("mean").number();
      const double sd = d.at("sd").number();
      const double lower = d.number("lower", 1.0);
      const double upper = d.number("upper", mean + 6.0 * sd);
      spec = DemandSpec::truncated_normal(horizon, n_types, mean, sd, lower, upper);
    } else if (kind == "custom") {
      spec = DemandSpec::custom(horizon, n_types, d.at("values").numbers(), d.at("probs").numbers());
    } else {
      d.at("kind").fail("unknown demand kind '" + kind + "'");
    }
    if (d.has("round_arrivals")) spec.set_round_arrivals(d.at("round_arrivals").boolean());
    return spec;
  });
}

PerishLaw read_law(const Node& p, std::size_t horizon) {
  const std::string kind = p.at("kind").string();
  return wrap(p, [&]() -> PerishLaw {
    if (kind == "deterministic") return PerishLaw(DeterministicPerish{p.at("time").integer()});
    if (kind == "geometric") return PerishLaw(GeometricPerish{p.at("p").number()});
    if (kind == "uniform_int") return PerishLaw(UniformIntPerish{p.at("lo").integer(), p.at("hi").integer()});
    if (kind == "rounded_uniform") return PerishLaw::rounded_uniform(p.at("lo").number(), p.at("hi").number());
    if (kind == "after_horizon") return PerishLaw::after_horizon(horizon);
    if (kind == "custom") return PerishLaw(CustomPerish{p.at("support").integers(), p.at("probs").numbers()});
    p.at("kind").fail("unknown perishing kind '" + kind + "'");
  });
}

PerishingSpec read_perishing(const Node& p, std::size_t horizon, std::size_t budget) {
  const std::string kind = p.at("kind").string();
  if (kind == "per_unit") {
    const Node units = p.at("units");
    if (units.size() != budget) units.fail("expected one entry per unit (" + std::to_string(budget) + ")");
    std::vector<PerishLaw> laws;
    for (std::size_t b = 0; b < budget; ++b) laws.push_back(read_law(units.at(b), horizon));
    return PerishingSpec(std::move(laws));
  }
  if (kind == "deterministic" && p.has("times")) {
    const auto times = p.at("times").integers();
    if (times.size() != budget) p.at("times").fail("expected one time per unit");
    std::vector<PerishLaw> laws;
    for (std::size_t b = 0; b < budget; ++b) {
      laws.push_back(wrap(p.at("times").at(b), [&] { return PerishLaw(DeterministicPerish{times[b]}); }));
    }
    return PerishingSpec(std::move(laws));
  }
  return PerishingSpec::iid(read_law(p, horizon), budget);
}

ScheduleSpec read_schedule(const Node& s) {
  ScheduleSpec spec;
  const Node kind = s.at("kind");
  spec.kind = wrap(kind, [&] { return schedule_kind_from_string(kind.string()); });
  if (spec.kind == ScheduleKind::kExplicit) {
    for (long r : s.at("ranks").integers()) {
      if (r < 1) s.at("ranks").fail("ranks are 1-based");
      spec.ranks.push_back(static_cast<std::size_t>(r));
    }
  }
  return spec;
}

ProblemInstance from_named(const Node& root) {
  NamedInstanceParams params;
  params.name = root.at("named").string();
  if (root.has("horizon")) params.horizon = root.at("horizon").positive();
  if (root.has("budget")) params.budget = root.at("budget").positive();
  params.alpha = root.number("alpha", 0.0);
  params.truncation_width = root.number("truncation_width", kNamedTruncationWidth);
  if (root.has("schedule")) params.schedule = read_schedule(root.at("schedule")).kind;
  ProblemInstance inst = wrap(root, [&] { return make_named_instance(params); });
  if (root.has("delta")) inst.delta = root.at("delta").number();
  if (root.has("envy_budget")) inst.envy_budget = root.at("envy_budget").number();
  return inst;
}

}  // namespace

ProblemInstance instance_from_json(const json& doc) {
  const Node root(doc, "");
  if (!doc.is_object()) root.fail("instance must be a table");
  ProblemInstance inst;
  if (root.has("named")) {
    inst = from_named(root);
  } else {
    if (root.has("name")) inst.name = root.at("name").string();
    inst.horizon = root.at("horizon").positive();
    inst.budget = root.at("budget").positive();
    inst.delta = root.at("delta").number();
    inst.envy_budget = root.number("envy_budget", 0.0);
    if (root.has("types")) {
      const Node types = root.at("types");
      for (std::size_t i = 0; i < types.size(); ++i) {
        const Node t = types.at(i);
        TypeProfile tp;
        tp.id = t.has("id") ? t.at("id").string() : std::to_string(i);
        tp.weight = t.number("weight", 1.0);
        inst.types.push_back(tp);
      }
    } else {
      inst.types = {{"all", 1.0}};
    }
    inst.demand = read_demand(root.at("demand"), inst.horizon, inst.types.size());
    inst.perishing = read_perishing(root.at("perishing"), inst.horizon, inst.budget);
    if (root.has("schedule")) inst.schedule = read_schedule(root.at("schedule"));
  }
  wrap(root, [&] {
    inst.validate();
    return 0;
  });
  return inst;
}

ProblemInstance parse_instance(const std::string& text, bool toml) {
  json doc;
  if (toml) {
    doc = parse_toml(text);
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("json: ") + e.what());
    }
  }
  return instance_from_json(doc);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  bool toml;
  auto ends_with = [&](const std::string& suf) {
    return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".toml")) {
    toml = true;
  } else if (ends_with(".json")) {
    toml = false;
  } else {
    const auto pos = text.find_first_not_of(" \t\r\n");
    toml = pos == std::string::npos || text[pos] != '{';
  }
  try {
    return parse_instance(text, toml);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + strip_code(e));
  }
}

}  // namespace perishfair
