// perishfair command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perishfair/error.hpp"
#include "perishfair/guardrail.hpp"
#include "perishfair/harness.hpp"
#include "perishfair/instance_io.hpp"

namespace pf = perishfair;
using nlohmann::json;

namespace {

struct InstanceArgs {
  std::string file;
  std::string named;
  std::size_t horizon = 0;
  std::size_t budget = 0;
  double alpha = 0.0;
  std::string schedule;
  double truncation_width = pf::kNamedTruncationWidth;
  double lt = -1.0;
  double delta = -1.0;
};

void add_instance_options(CLI::App* app, InstanceArgs& a) {
  auto* file = app->add_option("--instance,-i", a.file, "Instance file (.toml or .json)");
  auto* named = app->add_option("--named", a.named, "Built-in instance name");
  file->excludes(named);
  app->add_option("--horizon,-T", a.horizon, "Horizon for a named instance");
  app->add_option("--budget,-B", a.budget, "Budget for a named instance");
  app->add_option("--alpha", a.alpha, "Geometric rate exponent, p = T^-(1+alpha)");
  app->add_option("--schedule", a.schedule, "Schedule override: identity|mean|cv|lcb");
  app->add_option("--truncation-width", a.truncation_width, "Demand truncation half-width in sd units");
  app->add_option("--lt", a.lt, "Envy budget L_T override");
  app->add_option("--delta", a.delta, "Failure probability override");
}

pf::ProblemInstance resolve_instance(const InstanceArgs& a) {
  pf::ProblemInstance inst;
  if (!a.file.empty()) {
    inst = pf::load_instance(a.file);
  } else if (!a.named.empty()) {
    pf::NamedInstanceParams p;
    p.name = a.named;
    p.horizon = a.horizon;
    p.budget = a.budget;
    p.alpha = a.alpha;
    p.truncation_width = a.truncation_width;
    if (!a.schedule.empty()) p.schedule = pf::schedule_kind_from_string(a.schedule);
    inst = pf::make_named_instance(p);
  } else {
    throw pf::Error(pf::ErrorCode::kInvalidConfig, "one of --instance or --named is required");
  }
  if (!a.schedule.empty() && !a.file.empty()) inst.schedule.kind = pf::schedule_kind_from_string(a.schedule);
  if (a.lt >= 0.0) inst.envy_budget = a.lt;
  if (a.delta > 0.0) inst.delta = a.delta;
  inst.validate();
  return inst;
}

std::vector<pf::PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<pf::PolicyKind> out;
  for (const auto& n : names) out.push_back(pf::policy_kind_from_string(n));
  if (out.empty()) {
    out = {pf::PolicyKind::kStaticProportional, pf::PolicyKind::kStaticXLower, pf::PolicyKind::kVanillaGuardrail,
           pf::PolicyKind::kPerishingGuardrail};
  }
  return out;
}

json summary_json(const pf::Summary& s) { return {{"mean", s.mean}, {"ci", s.ci_halfwidth}}; }

json row_json(const pf::AggregateRow& r) {
  return {{"policy", pf::to_string(r.policy)},
          {"envy_budget", r.envy_budget},
          {"reps", r.count},
          {"counterfactual_envy", summary_json(r.counterfactual_envy)},
          {"hindsight_envy", summary_json(r.hindsight_envy)},
          {"inefficiency", summary_json(r.inefficiency)},
          {"spoilage", summary_json(r.spoilage)},
          {"stockout", summary_json(r.stockout)},
          {"l_perish", summary_json(r.l_perish)},
          {"x_lower", summary_json(r.x_lower)}};
}

json metrics_json(const pf::MetricsReport& m) {
  return {{"counterfactual_envy", m.counterfactual_envy},
          {"hindsight_envy", m.hindsight_envy},
          {"inefficiency", m.inefficiency},
          {"spoilage", m.spoilage},
          {"leftover", m.leftover},
          {"stockout", m.stockout},
          {"offset_expiring", m.offset_expiring}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw pf::Error(pf::ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair allocation of perishable resources: guardrail planning and simulation"};
  app.require_subcommand(1);

  // xlower
  InstanceArgs xl_inst;
  double xl_eps = 0.0;
  std::string xl_conf = "full";
  std::string xl_grid;
  std::size_t xl_points = 101;
  long xl_mc = 0;
  std::uint64_t xl_seed = 1;
  auto* xl = app.add_subcommand("xlower", "Compute the lower guardrail and perishing-induced loss");
  add_instance_options(xl, xl_inst);
  xl->add_option("--epsilon", xl_eps, "Line-search step (default 1e-3 B/N-bar)");
  xl->add_option("--conf", xl_conf, "Perishing confidence: full|zero")->check(CLI::IsMember({"full", "zero"}));
  xl->add_option("--grid-out", xl_grid, "Write x,delta_bar,rhs grid as CSV");
  xl->add_option("--grid-points", xl_points, "Grid size for --grid-out");
  xl->add_option("--mc-reps", xl_mc, "Estimate mu(X) by Monte Carlo with this many draws");
  xl->add_option("--seed", xl_seed, "Seed for schedule tie-breaks and Monte Carlo");

  // simulate
  InstanceArgs sim_inst;
  std::string sim_policy = "perishing_guardrail";
  std::uint64_t sim_seed = 1;
  std::string sim_trace;
  std::string sim_conf = "full";
  auto* sim = app.add_subcommand("simulate", "Run one policy on one sample path");
  add_instance_options(sim, sim_inst);
  sim->add_option("--policy", sim_policy, "perishing_guardrail|vanilla_guardrail|static_x_lower|static_proportional");
  sim->add_option("--seed", sim_seed, "Replication seed");
  sim->add_option("--trace-out", sim_trace, "Per-round CSV trace");
  sim->add_option("--conf", sim_conf, "Perishing confidence: full|zero")->check(CLI::IsMember({"full", "zero"}));

  // sweep
  InstanceArgs sw_inst;
  long sw_reps = 150;
  std::uint64_t sw_seed = 1;
  std::size_t sw_workers = 0;
  std::string sw_out;
  std::vector<std::string> sw_policies;
  std::vector<double> sw_betas;
  std::string sw_conf = "full";
  auto* sw = app.add_subcommand("sweep", "Envy-efficiency trade-off over L_T = T^-beta");
  add_instance_options(sw, sw_inst);
  sw->add_option("--reps,-R", sw_reps, "Replications");
  sw->add_option("--seed", sw_seed, "Base seed");
  sw->add_option("--workers", sw_workers, "Worker threads (default: PERISHFAIR_THREADS or all cores)");
  sw->add_option("--out,-o", sw_out, "CSV output (default stdout)");
  sw->add_option("--policies", sw_policies, "Policies to include")->delimiter(',');
  sw->add_option("--conf", sw_conf, "Perishing confidence: full|zero")->check(CLI::IsMember({"full", "zero"}));
  sw->add_option("--betas", sw_betas, "Beta grid (default 0:0.05:1 plus inf)")->delimiter(',');

  // run
  InstanceArgs run_inst;
  long run_reps = 150;
  std::uint64_t run_seed = 1;
  std::size_t run_workers = 0;
  std::string run_csv;
  std::vector<std::string> run_policies;
  double run_beta = pf::kDefaultEnvyExponent;
  std::string run_conf = "full";
  auto* run = app.add_subcommand("run", "Replicated comparison of policies (table rows)");
  add_instance_options(run, run_inst);
  run->add_option("--reps,-R", run_reps, "Replications");
  run->add_option("--seed", run_seed, "Base seed");
  run->add_option("--workers", run_workers, "Worker threads");
  run->add_option("--csv-out", run_csv, "Per-replication CSV");
  run->add_option("--policies", run_policies, "Policies to include")->delimiter(',');
  run->add_option("--conf", run_conf, "Perishing confidence: full|zero")->check(CLI::IsMember({"full", "zero"}));
  run->add_option("--beta", run_beta, "L_T = T^-beta when --lt is not given");

  // check-oe
  InstanceArgs oe_inst;
  long oe_reps = 150;
  std::uint64_t oe_seed = 1;
  auto* oe = app.add_subcommand("check-oe", "Estimate the probability that a path is offset-expiring");
  add_instance_options(oe, oe_inst);
  oe->add_option("--reps,-R", oe_reps, "Replications");
  oe->add_option("--seed", oe_seed, "Base seed");

  // calibrate
  std::string cal_csv;
  auto* cal = app.add_subcommand("calibrate", "Fit geometric perishing and normal demand to a retail series");
  cal->add_option("--csv", cal_csv, "day,begin_stock,restock,sales,end_stock")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*xl) {
      const auto inst = resolve_instance(xl_inst);
      const auto schedule = pf::build_schedule(inst.schedule, inst.perishing, xl_seed);
      pf::PlanOptions opt;
      opt.epsilon = xl_eps;
      opt.conf_mode = xl_conf == "zero" ? pf::ConfMode::kZero : pf::ConfMode::kFull;
      if (xl_mc > 0) opt.mu_method = pf::MuMethod::monte_carlo(xl_mc, xl_seed);
      const auto plan = pf::compute_x_lower(inst, schedule, opt);
      if (!xl_grid.empty()) {
        auto out = open_out(xl_grid);
        out << "x,delta_bar,rhs\n";
        for (const auto& g : pf::x_grid(inst, schedule, xl_points, opt.conf_mode)) {
          out << fmt(g.x) << ',' << fmt(g.delta_bar) << ',' << fmt(g.rhs) << '\n';
        }
      }
      json j = {{"instance", inst.name},
                {"x_lower", plan.x_lower},
                {"x_upper", plan.x_upper},
                {"l_perish", plan.l_perish},
                {"delta_bar_at_x_lower", plan.delta_bar_at_x_lower},
                {"n_bar", plan.n_bar},
                {"baseline", plan.baseline},
                {"epsilon", plan.epsilon}};
      std::cout << j.dump(2) << '\n';
    } else if (*sim) {
      const auto inst = resolve_instance(sim_inst);
      const auto path = pf::sample_path(inst, sim_seed);
      const auto schedule = pf::build_schedule(inst.schedule, inst.perishing, sim_seed, &path);
      pf::PlanOptions opt;
      opt.conf_mode = sim_conf == "zero" ? pf::ConfMode::kZero : pf::ConfMode::kFull;
      const auto plan = pf::compute_x_lower(inst, schedule, opt);
      const auto policy = pf::make_policy(pf::policy_kind_from_string(sim_policy), plan);
      const auto traj = pf::run_path(inst, schedule, policy, path);
      if (!sim_trace.empty()) {
        auto out = open_out(sim_trace);
        out << "round,n_t,x_t,branch,budget,pua\n";
        for (const auto& r : traj.rounds) {
          out << r.round << ',' << fmt(r.n_t) << ',' << fmt(r.x_t) << ',' << pf::to_string(r.branch) << ','
              << fmt(r.budget_before) << ',' << fmt(r.pua) << '\n';
        }
      }
      json j = metrics_json(pf::compute_metrics(inst, path, traj));
      j["policy"] = pf::to_string(policy.kind);
      j["x_lower"] = plan.x_lower;
      j["seed"] = sim_seed;
      std::cout << j.dump(2) << '\n';
    } else if (*sw) {
      pf::ExperimentConfig cfg;
      cfg.instance = resolve_instance(sw_inst);
      cfg.policies = parse_policies(sw_policies);
      cfg.replications = sw_reps;
      cfg.base_seed = sw_seed;
      cfg.workers = sw_workers;
      cfg.plan_options.conf_mode = sw_conf == "zero" ? pf::ConfMode::kZero : pf::ConfMode::kFull;
      const auto rows = pf::sweep_tradeoff(cfg, sw_betas.empty() ? pf::default_beta_grid() : sw_betas);
      if (sw_out.empty()) {
        pf::write_sweep_csv(std::cout, rows);
      } else {
        auto out = open_out(sw_out);
        pf::write_sweep_csv(out, rows);
      }
    } else if (*run) {
      pf::ExperimentConfig cfg;
      cfg.instance = resolve_instance(run_inst);
      if (run_inst.lt < 0.0) cfg.instance.envy_budget = pf::envy_budget_for_beta(cfg.instance.horizon, run_beta);
      cfg.policies = parse_policies(run_policies);
      cfg.replications = run_reps;
      cfg.base_seed = run_seed;
      cfg.workers = run_workers;
      cfg.plan_options.conf_mode = run_conf == "zero" ? pf::ConfMode::kZero : pf::ConfMode::kFull;
      cfg.csv_path = run_csv;
      const auto res = pf::run_experiment(cfg);
      json rows = json::array();
      for (const auto& r : res.stats.rows) rows.push_back(row_json(r));
      std::cout << json{{"instance", cfg.instance.name}, {"reps", run_reps}, {"rows", rows}}.dump(2) << '\n';
    } else if (*oe) {
      const auto inst = resolve_instance(oe_inst);
      const auto e = pf::estimate_oe_probability(inst, oe_reps, oe_seed);
      std::cout << json{{"estimate", e.estimate}, {"ci_halfwidth", e.ci_halfwidth}, {"reps", e.reps}}.dump(2)
                << '\n';
    } else if (*cal) {
      const auto c = pf::calibrate_retail(pf::read_retail_csv(cal_csv));
      std::cout << json{{"p_hat", c.p_hat},
                        {"p_hat_std_error", c.p_hat_std_error},
                        {"demand_mean", c.demand_mean},
                        {"demand_sd", c.demand_sd},
                        {"days", c.days}}
                       .dump(2)
                << '\n';
    }
  } catch (const pf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
