#include "perishfair/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "perishfair/error.hpp"

namespace perishfair {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProblemInstance base_instance(std::string name, std::size_t horizon, std::size_t budget) {
  ProblemInstance inst;
  inst.name = std::move(name);
  inst.horizon = horizon;
  inst.budget = budget;
  inst.types = {{"all", 1.0}};
  return inst;
}

double default_envy(std::size_t horizon) { return std::pow(static_cast<double>(horizon), -kDefaultEnvyExponent); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorCode::kParse, where + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Named instances
// ---------------------------------------------------------------------------

DemandSpec named_truncated_normal(std::size_t horizon, double mean, double sd, double width) {
  const double lower = std::max(1.0, mean - width * sd);
  const double upper = mean + width * sd;
  return DemandSpec::truncated_normal(horizon, 1, mean, sd, lower, upper);
}

std::vector<std::string> named_instances() {
  return {"running_example", "flipped_order", "geometric_sweep", "front_loaded", "back_loaded", "ginger"};
}

ProblemInstance make_named_instance(const NamedInstanceParams& params) {
  const std::string& name = params.name;
  if (name == "running_example") {
    ProblemInstance inst = base_instance(name, 3, 3);
    inst.demand = DemandSpec::deterministic({{1.0}, {2.0}, {1.0}});
    inst.perishing = PerishingSpec({
        PerishLaw(CustomPerish{{1, 3}, {0.5, 0.5}}),
        PerishLaw(CustomPerish{{2, 4}, {0.5, 0.5}}),
        PerishLaw(CustomPerish{{1, 2}, {0.5, 0.5}}),
    });
    inst.schedule = {ScheduleKind::kExplicit, {2, 3, 1}};
    inst.delta = 0.05;
    return inst;
  }
  if (name == "flipped_order") {
    const std::size_t T = params.horizon ? params.horizon : 10;
    ProblemInstance inst = base_instance(name, T, T);
    inst.demand = DemandSpec::deterministic(std::vector<std::vector<double>>(T, {1.0}));
    std::vector<PerishLaw> units;
    std::vector<std::size_t> ranks;
    for (std::size_t b = 1; b <= T; ++b) {
      units.emplace_back(DeterministicPerish{static_cast<long>(b)});
      ranks.push_back(T + 1 - b);
    }
    inst.perishing = PerishingSpec(std::move(units));
    inst.schedule = {ScheduleKind::kExplicit, std::move(ranks)};
    inst.delta = T >= 2 ? 1.0 / static_cast<double>(T) : 0.5;
    inst.envy_budget = 0.0;
    return inst;
  }
  if (name == "geometric_sweep") {
    const std::size_t T = params.horizon ? params.horizon : 100;
    const std::size_t B = params.budget ? params.budget : 2 * T;
    if (!(params.alpha > 0.0)) throw Error(ErrorCode::kInvalidConfig, "geometric_sweep needs alpha > 0");
    ProblemInstance inst = base_instance(name, T, B);
    inst.demand = named_truncated_normal(T, kSyntheticDemandMean, kSyntheticDemandSd, params.truncation_width);
    const double p = std::pow(static_cast<double>(T), -(1.0 + params.alpha));
    inst.perishing = PerishingSpec::iid(PerishLaw(GeometricPerish{p}), B);
    inst.schedule = {ScheduleKind::kIdentity, {}};
    inst.delta = 1.0 / static_cast<double>(T);
    inst.envy_budget = default_envy(T);
    return inst;
  }
  if (name == "front_loaded" || name == "back_loaded") {
    const std::size_t T = params.horizon ? params.horizon : 50;
    const std::size_t B = params.budget ? params.budget : 2 * T;
    ProblemInstance inst = base_instance(name, T, B);
    inst.demand = named_truncated_normal(T, kSyntheticDemandMean, kSyntheticDemandSd, params.truncation_width);
    const double Td = static_cast<double>(T);
    std::vector<PerishLaw> units;
    units.reserve(B);
    for (std::size_t b = 1; b <= B; ++b) {
      const double bd = static_cast<double>(b);
      if (name == "front_loaded") {
        units.push_back(b <= T ? PerishLaw::rounded_uniform(Td / 2.0 - bd / 2.0, Td / 2.0 + bd / 2.0)
                               : PerishLaw(DeterministicPerish{static_cast<long>(T)}));
      } else {
        units.push_back(b <= T ? PerishLaw(DeterministicPerish{static_cast<long>(b) + 1})
                               : PerishLaw::rounded_uniform(Td, bd + 1.0));
      }
    }
    inst.perishing = PerishingSpec(std::move(units));
    inst.schedule = {params.schedule, {}};
    inst.delta = 1.0 / Td;
    inst.envy_budget = default_envy(T);
    return inst;
  }
  if (name == "ginger") {
    const std::size_t T = params.horizon ? params.horizon : kGingerHorizon;
    const std::size_t B = params.budget ? params.budget : kGingerBudget;
    ProblemInstance inst = base_instance(name, T, B);
    inst.demand = named_truncated_normal(T, kGingerDemandMean, kGingerDemandSd, params.truncation_width);
    inst.perishing = PerishingSpec::iid(PerishLaw(GeometricPerish{kGingerPerishRate}), B);
    inst.schedule = {ScheduleKind::kIdentity, {}};
    inst.delta = 1.0 / static_cast<double>(T);
    inst.envy_budget = default_envy(T);
    return inst;
  }
  throw Error(ErrorCode::kUnknownInstance, "no named instance '" + name + "'");
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.ci_halfwidth = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

const AggregateRow& AggregateStats::find(PolicyKind policy, double envy_budget) const {
  for (const auto& r : rows) {
    if (r.policy == policy && r.envy_budget == envy_budget) return r;
  }
  throw Error(ErrorCode::kInvalidInput, std::string("no aggregate row for ") + to_string(policy));
}

const AggregateRow& AggregateStats::find(PolicyKind policy) const {
  for (const auto& r : rows) {
    if (r.policy == policy) return r;
  }
  throw Error(ErrorCode::kInvalidInput, std::string("no aggregate row for ") + to_string(policy));
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PERISHFAIR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

AggregateStats aggregate(const std::vector<ReplicationRecord>& records, const std::vector<PolicyKind>& policies,
                         const std::vector<double>& envy_budgets) {
  AggregateStats stats;
  for (double lt : envy_budgets) {
    for (PolicyKind pk : policies) {
      std::vector<double> ef, envy, ineff, spoil, stock, lp, xl;
      for (const auto& rec : records) {
        if (rec.policy != pk || rec.envy_budget != lt) continue;
        ef.push_back(rec.metrics.counterfactual_envy);
        envy.push_back(rec.metrics.hindsight_envy);
        ineff.push_back(rec.metrics.inefficiency);
        spoil.push_back(rec.metrics.spoilage);
        stock.push_back(rec.metrics.stockout ? 1.0 : 0.0);
        lp.push_back(rec.l_perish);
        xl.push_back(rec.x_lower);
      }
      AggregateRow row;
      row.policy = pk;
      row.envy_budget = lt;
      row.count = static_cast<long>(ef.size());
      row.counterfactual_envy = summarize(ef);
      row.hindsight_envy = summarize(envy);
      row.inefficiency = summarize(ineff);
      row.spoilage = summarize(spoil);
      row.stockout = summarize(stock);
      row.l_perish = summarize(lp);
      row.x_lower = summarize(xl);
      stats.rows.push_back(row);
    }
  }
  return stats;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ProblemInstance& inst = config.instance;
  inst.validate();
  if (config.replications < 1) throw Error(ErrorCode::kInvalidConfig, "replications must be >= 1");
  if (config.policies.empty()) throw Error(ErrorCode::kInvalidConfig, "policy list is empty");
  const std::vector<double> budgets =
      config.envy_budgets.empty() ? std::vector<double>{inst.envy_budget} : config.envy_budgets;

  const std::size_t R = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<ReplicationRecord>> per_rep(R);

  // Plans depend only on the schedule, which only varies through tie-breaks.
  std::mutex cache_mutex;
  std::map<std::vector<std::size_t>, std::shared_ptr<const GuardrailPlan>> cache;
  auto plan_for = [&](const Schedule& schedule) {
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      auto it = cache.find(schedule.ranks());
      if (it != cache.end()) return it->second;
    }
    auto plan = std::make_shared<const GuardrailPlan>(compute_x_lower(inst, schedule, config.plan_options));
    std::lock_guard<std::mutex> lock(cache_mutex);
    return cache.emplace(schedule.ranks(), plan).first->second;
  };

  auto run_one = [&](std::size_t r) {
    const std::uint64_t seed = replication_seed(config.base_seed, r);
    const SamplePath path = sample_path(inst, seed);
    const Schedule schedule = build_schedule(inst.schedule, inst.perishing, seed, &path);
    const auto plan = plan_for(schedule);
    auto& out = per_rep[r];
    for (double lt : budgets) {
      const GuardrailPlan p = plan->with_envy_budget(lt);
      for (PolicyKind pk : config.policies) {
        const Policy policy = make_policy(pk, p);
        const Trajectory traj = run_path(inst, schedule, policy, path);
        ReplicationRecord rec;
        rec.replication = static_cast<long>(r);
        rec.seed = seed;
        rec.policy = pk;
        rec.envy_budget = lt;
        rec.x_lower = p.x_lower;
        rec.l_perish = p.l_perish;
        rec.metrics = compute_metrics(inst, path, traj);
        out.push_back(rec);
      }
    }
  };

  const std::size_t workers = std::min(resolve_workers(config.workers), R);
  if (workers <= 1) {
    for (std::size_t r = 0; r < R; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < R; r = next++) {
          try {
            run_one(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentResult result;
  for (auto& v : per_rep) {
    for (auto& rec : v) result.records.push_back(std::move(rec));
  }
  result.stats = aggregate(result.records, config.policies, budgets);
  if (!config.csv_path.empty()) write_replication_csv(config.csv_path, result.records);
  return result;
}

void write_replication_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
  out << "# perishfair-csv v1\n";
  out << "replication,seed,policy,envy_budget,x_lower,l_perish,counterfactual_envy,hindsight_envy,"
         "inefficiency,spoilage,leftover,stockout,offset_expiring\n";
  for (const auto& r : records) {
    out << r.replication << ',' << r.seed << ',' << to_string(r.policy) << ',' << fmt(r.envy_budget) << ','
        << fmt(r.x_lower) << ',' << fmt(r.l_perish) << ',' << fmt(r.metrics.counterfactual_envy) << ','
        << fmt(r.metrics.hindsight_envy) << ',' << fmt(r.metrics.inefficiency) << ',' << fmt(r.metrics.spoilage)
        << ',' << fmt(r.metrics.leftover) << ',' << (r.metrics.stockout ? 1 : 0) << ','
        << (r.metrics.offset_expiring ? 1 : 0) << '\n';
  }
}

void write_replication_csv(const std::string& path, const std::vector<ReplicationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_replication_csv(out, records);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

std::vector<ReplicationRecord> read_replication_csv(std::istream& in) {
  std::vector<ReplicationRecord> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto c = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (c.size() != 13) throw Error(ErrorCode::kParse, where + ": expected 13 columns");
    ReplicationRecord r;
    r.replication = std::stol(c[0]);
    r.seed = std::stoull(c[1]);
    r.policy = policy_kind_from_string(c[2]);
    r.envy_budget = parse_double(c[3], where);
    r.x_lower = parse_double(c[4], where);
    r.l_perish = parse_double(c[5], where);
    r.metrics.counterfactual_envy = parse_double(c[6], where);
    r.metrics.hindsight_envy = parse_double(c[7], where);
    r.metrics.inefficiency = parse_double(c[8], where);
    r.metrics.spoilage = parse_double(c[9], where);
    r.metrics.leftover = parse_double(c[10], where);
    r.metrics.stockout = c[11] == "1";
    r.metrics.offset_expiring = c[12] == "1";
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::vector<double> default_beta_grid() {
  std::vector<double> betas;
  for (int i = 0; i <= 20; ++i) betas.push_back(0.05 * i);
  betas.push_back(kBetaInfinity);
  return betas;
}

double envy_budget_for_beta(std::size_t horizon, double beta) {
  if (std::isinf(beta)) return 0.0;
  return std::pow(static_cast<double>(horizon), -beta);
}

std::vector<SweepRow> sweep_tradeoff(ExperimentConfig config, const std::vector<double>& betas) {
  if (betas.empty()) throw Error(ErrorCode::kInvalidConfig, "beta grid is empty");
  config.envy_budgets.clear();
  for (double b : betas) config.envy_budgets.push_back(envy_budget_for_beta(config.instance.horizon, b));
  const ExperimentResult res = run_experiment(config);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    for (PolicyKind pk : config.policies) {
      SweepRow row;
      row.policy = pk;
      row.beta = betas[i];
      row.envy_budget = config.envy_budgets[i];
      row.stats = res.stats.find(pk, row.envy_budget);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# perishfair-csv v1\n";
  out << "policy,beta,envy_budget,reps,counterfactual_envy,counterfactual_envy_ci,hindsight_envy,hindsight_envy_ci,"
         "inefficiency,inefficiency_ci,spoilage,spoilage_ci,stockout,stockout_ci\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out << to_string(r.policy) << ',' << (std::isinf(r.beta) ? std::string("inf") : fmt(r.beta)) << ','
        << fmt(r.envy_budget) << ',' << s.count << ',' << fmt(s.counterfactual_envy.mean) << ','
        << fmt(s.counterfactual_envy.ci_halfwidth) << ',' << fmt(s.hindsight_envy.mean) << ','
        << fmt(s.hindsight_envy.ci_halfwidth) << ',' << fmt(s.inefficiency.mean) << ','
        << fmt(s.inefficiency.ci_halfwidth) << ',' << fmt(s.spoilage.mean) << ',' << fmt(s.spoilage.ci_halfwidth)
        << ',' << fmt(s.stockout.mean) << ',' << fmt(s.stockout.ci_halfwidth) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Retail calibration
// ---------------------------------------------------------------------------

RetailSeries read_retail_csv(std::istream& in) {
  RetailSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto c = split_csv_line(line);
    if (!header) {
      const std::vector<std::string> want = {"day", "begin_stock", "restock", "sales", "end_stock"};
      if (c != want) throw Error(ErrorCode::kParse, "retail header must be day,begin_stock,restock,sales,end_stock");
      header = true;
      continue;
    }
    const std::string where = "retail line " + std::to_string(line_no);
    if (c.size() != 5) throw Error(ErrorCode::kParse, where + ": expected 5 columns");
    RetailDay d;
    d.day = c[0];
    d.begin_stock = parse_double(c[1], where + " begin_stock");
    d.restock = parse_double(c[2], where + " restock");
    d.sales = parse_double(c[3], where + " sales");
    d.end_stock = parse_double(c[4], where + " end_stock");
    series.push_back(d);
  }
  if (!header) throw Error(ErrorCode::kParse, "retail file has no header");
  return series;
}

RetailSeries read_retail_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_retail_csv(in);
}

RetailCalibration calibrate_retail(const RetailSeries& series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidInput, "retail series is empty");
  double perished = 0.0;
  double stock = 0.0;
  double sales = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& d = series[i];
    if (d.begin_stock < 0.0 || d.restock < 0.0 || d.sales < 0.0 || d.end_stock < 0.0) {
      throw Error(ErrorCode::kDataIntegrity, "day " + std::to_string(i) + " (" + d.day + ") has a negative field");
    }
    const double p = d.begin_stock + d.restock - d.sales - d.end_stock;
    if (p < -1e-6) {
      throw Error(ErrorCode::kDataIntegrity,
                  "day " + std::to_string(i) + " (" + d.day + ") implies negative perishing " + fmt(p));
    }
    perished += std::max(0.0, p);
    stock += d.begin_stock;
    sales += d.sales;
  }
  if (!(stock > 0.0)) throw Error(ErrorCode::kInvalidInput, "total begin_stock must be positive");
  RetailCalibration c;
  c.days = series.size();
  c.p_hat = perished / stock;
  c.p_hat_std_error = std::sqrt(std::max(0.0, c.p_hat * (1.0 - c.p_hat)) / stock);
  const double n = static_cast<double>(series.size());
  c.demand_mean = sales / n;
  if (series.size() > 1) {
    double ss = 0.0;
    for (const auto& d : series) ss += (d.sales - c.demand_mean) * (d.sales - c.demand_mean);
    c.demand_sd = std::sqrt(ss / (n - 1.0));
  }
  return c;
}

}  // namespace perishfair
