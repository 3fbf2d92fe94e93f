#include "fabflow/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "fabflow/csv.hpp"
#include "fabflow/error.hpp"
#include "fabflow/fixtures.hpp"
#include "fabflow/netflow.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/report.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/scenario.hpp"
#include "fabflow/scheduler.hpp"
#include "json.hpp"

namespace fabflow::cli {

namespace {

using nlohmann::json;
using csv::format_number;

struct Invocation {
  std::string subcommand;
  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  std::vector<std::string> overrides;
  bool list = false;
};

// Ordered key=value pairs printed as the one-line summary.
class Summary {
 public:
  void add(std::string key, std::string value) { pairs_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
  void add(std::string key, std::int64_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }

  std::string line() const {
    std::string out;
    for (const auto& [k, v] : pairs_) {
      if (!out.empty()) out += ' ';
      out += k + "=" + v;
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

struct Context {
  const Invocation& inv;
  scenario::Scenario scenario;
  std::string digest;
  Summary summary;
  std::vector<report::Artifact> artifacts;
};

scenario::Scenario resolve_scenario(const Invocation& inv) {
  if (inv.scenario_path.empty()) throw Error(Errc::invalid_argument, "--scenario is required");
  scenario::Scenario s;
  if (std::filesystem::exists(inv.scenario_path)) {
    s = scenario::load_scenario(inv.scenario_path);
  } else if (scenario::fixture_text(inv.scenario_path)) {
    s = scenario::load_fixture(inv.scenario_path);
  } else {
    throw Error(Errc::io_error, "no scenario file or bundled fixture named '" + inv.scenario_path + "'");
  }
  for (const auto& o : inv.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError({"override: expected key=value, got '" + o + "'"});
    }
    s = scenario::apply_override(s, o.substr(0, eq), o.substr(eq + 1));
  }
  return s;
}

const scenario::QueueingSection& require_queueing(const scenario::Scenario& s) {
  if (!s.queueing) throw ValidationError({"scenario '" + s.name + "' has no queueing section"});
  return *s.queueing;
}

queueing::FleetConfig nominal_fleet(const scenario::Scenario& s) {
  if (!s.fleet) return {};
  if (s.fleet->nominal.empty()) throw ValidationError({"fleet.nominal: required by this stage"});
  return s.fleet->nominal_config();
}

netflow::FlowNetwork require_network(const scenario::Scenario& s) {
  if (!s.has_network()) throw ValidationError({"scenario '" + s.name + "' has no network section"});
  return netflow::build_network(s.network);
}

const scenario::SchedulingSection& require_scheduling(const scenario::Scenario& s) {
  if (!s.scheduling) throw ValidationError({"scenario '" + s.name + "' has no scheduling section"});
  return *s.scheduling;
}

std::string join_numbers(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    out += format_number(values[i]);
  }
  return out;
}

// --- stages -------------------------------------------------------------------

void run_maxflow(Context& ctx) {
  const auto net = require_network(ctx.scenario);
  const auto flow = netflow::max_flow(net);
  const auto cut = netflow::min_cut(net);
  ctx.summary.add("value_kg", flow.value);
  ctx.summary.add("cut_capacity_kg", cut.capacity);
  ctx.summary.add("edges", net.declared_edge_count());
  ctx.artifacts.push_back(report::Artifact::make_csv("flow.csv", report::flow_table(net, flow)));
  json doc = {{"value_kg", flow.value}, {"cut_capacity_kg", cut.capacity}, {"source_side", cut.source_side}};
  ctx.artifacts.push_back(report::Artifact::make_json("maxflow.json", doc.dump()));
}

void run_mincost(Context& ctx) {
  const auto net = require_network(ctx.scenario);
  const auto demand = ctx.scenario.demand_kg.value_or(netflow::max_flow(net).value);
  const auto flow = netflow::min_cost_flow(net, demand);
  ctx.summary.add("demand_kg", demand);
  ctx.summary.add("value_kg", flow.value);
  ctx.summary.add("cost", flow.cost());
  ctx.artifacts.push_back(report::Artifact::make_csv("flow.csv", report::flow_table(net, flow)));
  json doc = {{"demand_kg", demand}, {"value_kg", flow.value}, {"cost", flow.cost()}};
  ctx.artifacts.push_back(report::Artifact::make_json("mincost.json", doc.dump()));
}

void run_wip(Context& ctx) {
  const auto& q = require_queueing(ctx.scenario);
  const auto model = q.model();
  const auto c = nominal_fleet(ctx.scenario);
  const auto w = queueing::wip(model, q.nominal_p, c);
  const auto gradient = queueing::wip_gradient(model, q.nominal_p, c);
  ctx.summary.add("total_wip", w.total_wip);
  ctx.summary.add("max_utilization", *std::max_element(w.utilizations.begin(), w.utilizations.end()));
  ctx.summary.add("fleet", queueing::to_string(c));
  ctx.artifacts.push_back(report::Artifact::make_csv("wip.csv", report::wip_table(model, w)));
  json doc = {{"nominal_p", q.nominal_p.vector()},
              {"fleet", c.counts},
              {"total_wip", w.total_wip},
              {"gradient_free", gradient}};

  const auto grid = q.grid_points();
  if (!grid.empty()) {
    const auto mono = queueing::check_monotonicity(model, grid, c);
    for (const char* claim : {"positive_gradient", "decreasing_in_p0", "increasing_in_pi"}) {
      ctx.summary.add(claim, std::string(mono.all_pass(claim) ? "pass" : "fail"));
    }
    ctx.summary.add("grid_points", grid.size());
    ctx.artifacts.push_back(report::Artifact::make_csv("monotonicity.csv", report::monotonicity_table(mono)));
  }
  ctx.artifacts.push_back(report::Artifact::make_json("wip.json", doc.dump()));
}

void run_worstcase(Context& ctx) {
  const auto& q = require_queueing(ctx.scenario);
  const auto model = q.model();
  const auto c = nominal_fleet(ctx.scenario);
  const auto wc = planner::worst_case_direction(model, c, ctx.scenario.limits, q.nominal_p);
  ctx.summary.add("fleet", queueing::to_string(c));
  ctx.summary.add("v_star", wc.v_star);
  ctx.summary.add("p_star", join_numbers(wc.p_star.values()));
  ctx.summary.add("x_star", join_numbers(wc.x_star));
  ctx.artifacts.push_back(report::Artifact::make_json("worstcase.json", report::worst_case_json(wc, c)));
}

void run_plan(Context& ctx) {
  const auto& q = require_queueing(ctx.scenario);
  if (!ctx.scenario.fleet) throw ValidationError({"scenario '" + ctx.scenario.name + "' has no fleet section"});
  auto limits = ctx.scenario.limits;
  limits.mc_seed = ctx.inv.seed;
  const auto result =
      planner::plan_fleet(q.model(), q.nominal_p, ctx.scenario.fleet->candidates(), limits);
  ctx.summary.add("c_star", queueing::to_string(result.c_star));
  ctx.summary.add("v_star", result.worst_case.v_star);
  ctx.summary.add("nominal_wip", result.nominal_wip);
  ctx.summary.add("mode", std::string(planner::to_string(result.mode)));
  ctx.summary.add("examined", result.examined.size());
  if (result.exceedance_frequency) ctx.summary.add("exceedance_frequency", *result.exceedance_frequency);
  ctx.artifacts.push_back(
      report::Artifact::make_json("plan.json", report::plan_json(result, ctx.scenario.fleet->types)));
  ctx.artifacts.push_back(report::Artifact::make_csv("candidates.csv", report::plan_table(result)));
  ctx.artifacts.push_back(
      report::Artifact::make_csv("constraints.csv", report::constraint_table(result.feasibility)));
}

void run_schedule(Context& ctx) {
  const auto& sec = require_scheduling(ctx.scenario);
  const auto problem = sec.problem();
  const auto front = scheduler::ga_optimize(problem, ctx.scenario.metaheuristics.ga, ctx.inv.seed);
  const auto& best = front.best_makespan();
  const auto detail = scheduler::simulate(problem, best.assignment);
  const auto baseline = scheduler::evaluate_schedule(problem, scheduler::unoptimized_dispatch(problem, sec.baseline_index()));
  ctx.summary.add("front_size", front.members.size());
  ctx.summary.add("best_makespan_h", best.objectives.makespan);
  ctx.summary.add("best_cost", best.objectives.total_cost);
  ctx.summary.add("baseline_makespan_h", baseline.makespan);
  ctx.artifacts.push_back(report::Artifact::make_csv("pareto.csv", report::pareto_table(problem, front)));
  ctx.artifacts.push_back(report::Artifact::make_csv("schedule.csv", report::schedule_table(problem, detail)));
}

void run_bench(Context& ctx) {
  const auto& sec = require_scheduling(ctx.scenario);
  const auto& params = ctx.scenario.metaheuristics;
  const auto table = scheduler::benchmark(sec.problem(), params, params.benchmark_seeds, sec.baseline_index());
  double before = 0.0;
  double after = 0.0;
  int ga_wins = 0;
  for (const auto& row : table.rows) {
    if (row.method != "ga") continue;
    before += row.unoptimized_hours;
    after += row.after_hours;
    const auto* sa = table.find("sa", row.task_type);
    const auto* aco = table.find("aco", row.task_type);
    if (row.after_hours <= sa->after_hours && row.after_hours <= aco->after_hours) ++ga_wins;
  }
  ctx.summary.add("rows", table.rows.size());
  ctx.summary.add("seeds", params.benchmark_seeds.size());
  ctx.summary.add("ga_best_types", ga_wins);
  ctx.summary.add("baseline_total_h", before);
  ctx.summary.add("ga_total_h", after);
  ctx.artifacts.push_back(report::Artifact::make_csv("benchmark.csv", report::benchmark_table(table)));
  ctx.artifacts.push_back(
      report::Artifact::make_json("improvements.json", report::improvements_json(ctx.scenario.expected_improvements)));
}

void run_report(Context& ctx) {
  ctx.summary.add("improvements", ctx.scenario.expected_improvements.size());
  ctx.artifacts.push_back(report::Artifact::make_json("scenario.json", scenario::to_json(ctx.scenario)));
  ctx.artifacts.push_back(
      report::Artifact::make_json("improvements.json", report::improvements_json(ctx.scenario.expected_improvements)));
}

const std::map<std::string, std::function<void(Context&)>>& stages() {
  static const std::map<std::string, std::function<void(Context&)>> table = {
      {"maxflow", run_maxflow},   {"mincost", run_mincost},   {"wip", run_wip},
      {"worstcase", run_worstcase}, {"plan", run_plan},       {"schedule", run_schedule},
      {"bench", run_bench},       {"report", run_report}};
  return table;
}

int run_fixtures(const Invocation& inv, std::ostream& out, std::ostream& err) {
  if (!inv.list) {
    err << "fixtures: pass --list\n";
    out << "stage=fixtures error=invalid_argument\n";
    return kExitValidation;
  }
  std::string names;
  const auto catalog = scenario::fixture_catalog();
  for (const auto& f : catalog) {
    if (!names.empty()) names += ',';
    names += f.name;
  }
  out << "stage=fixtures count=" << catalog.size() << " fixtures=" << names << "\n";
  return kExitOk;
}

int run_stage(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Summary head;
  head.add("stage", inv.subcommand);
  head.add("seed", std::to_string(inv.seed));
  try {
    Context ctx{inv, resolve_scenario(inv), {}, {}, {}};
    ctx.digest = scenario::inputs_digest(ctx.scenario);
    ctx.summary = head;
    ctx.summary.add("scenario", ctx.scenario.name);
    stages().at(inv.subcommand)(ctx);
    ctx.summary.add("inputs_digest", ctx.digest);
    if (!inv.out_dir.empty()) {
      report::ReportBundle bundle{report::make_run_id(inv.subcommand, ctx.digest, inv.seed), ctx.digest,
                                  std::move(ctx.artifacts)};
      const auto written = report::emit_report(bundle, inv.out_dir);
      ctx.summary.add("artifacts", written.size());
    }
    out << ctx.summary.line() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    for (const auto& issue : e.issues()) err << "validation: " << issue << "\n";
    head.add("error", std::string(to_string(e.code())));
    head.add("issues", e.issues().size());
    out << head.line() << "\n";
    return kExitValidation;
  } catch (const UnstableStationError& e) {
    err << e.what() << "\n";
    head.add("error", std::string(to_string(e.code())));
    head.add("station", e.station_id());
    out << head.line() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << e.what() << "\n";
    head.add("error", std::string(to_string(e.code())));
    out << head.line() << "\n";
    return is_infeasibility(e.code()) ? kExitInfeasible : kExitValidation;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flow, queueing, fleet-planning and scheduling tools for wafer logistics", "fabflow"};
  app.require_subcommand(1);
  Invocation inv;

  for (const auto& [name, description] : std::vector<std::pair<std::string, std::string>>{
           {"maxflow", "maximum flow and minimum cut of the network"},
           {"mincost", "minimum-cost flow for the scenario demand"},
           {"wip", "WIP at the nominal WLTP point and monotonicity checks"},
           {"worstcase", "worst-case WLTP point and direction for the nominal fleet"},
           {"plan", "robust fleet plan"},
           {"schedule", "multi-objective GA schedule"},
           {"bench", "GA / SA / ACO benchmark per task type"},
           {"report", "scenario echo and published improvement figures"}}) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--scenario", inv.scenario_path, "scenario file or bundled fixture name")->required();
    sub->add_option("--out", inv.out_dir, "directory for report artifacts");
    sub->add_option("--seed", inv.seed, "random seed")->capture_default_str();
    sub->add_option("--set", inv.overrides, "override a scenario field (key=value)");
    sub->callback([&inv, name = name] { inv.subcommand = name; });
  }
  auto* fixtures = app.add_subcommand("fixtures", "bundled scenarios");
  fixtures->add_flag("--list", inv.list, "print the catalog");
  fixtures->callback([&inv] { inv.subcommand = "fixtures"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    out << "error=usage\n";
    return kExitValidation;
  }

  if (inv.subcommand == "fixtures") return run_fixtures(inv, out, err);
  return run_stage(inv, out, err);
}

}  // namespace fabflow::cli
