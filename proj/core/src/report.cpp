#include "fabflow/report.hpp"

#include <cmath>
#include <fstream>

#include "fabflow/error.hpp"
#include "json.hpp"

namespace fabflow::report {

using nlohmann::json;
using csv::format_number;

Artifact Artifact::make_csv(std::string name, csv::Table table) {
  Artifact a;
  a.name = std::move(name);
  a.kind = ArtifactKind::csv;
  a.table = std::move(table);
  return a;
}

Artifact Artifact::make_json(std::string name, std::string text) {
  Artifact a;
  a.name = std::move(name);
  a.kind = ArtifactKind::json;
  a.json = std::move(text);
  return a;
}

std::string make_run_id(std::string_view stage, std::string_view inputs_digest, std::uint64_t seed) {
  const std::string key = std::string(stage) + "\n" + std::string(inputs_digest) + "\n" + std::to_string(seed);
  return std::string(stage) + "-" + scenario::sha256_hex(key).substr(0, 16);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "failed writing '" + path.string() + "'");
}

void check_name(const Artifact& a) {
  const std::filesystem::path p(a.name);
  const auto ext = p.extension().string();
  if (a.name.empty() || p.has_parent_path() || a.name == "manifest.json" ||
      ext != (a.kind == ArtifactKind::csv ? ".csv" : ".json")) {
    throw Error(Errc::invalid_argument, "invalid artifact name '" + a.name + "'");
  }
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json worst_case_object(const planner::WorstCase& w) {
  return {{"p_star", w.p_star.vector()}, {"x_star", w.x_star}, {"v_star", w.v_star}, {"probes", w.probes}};
}

json constraints_object(const planner::ConstraintRecord& record) {
  json out = json::array();
  for (const auto& c : record.checks) {
    out.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"measured", finite_or_null(c.measured)},
                   {"limit", finite_or_null(c.limit)},
                   {"note", c.note}});
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
  if (bundle.artifacts.empty()) return {};
  for (const auto& a : bundle.artifacts) check_name(a);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  json manifest_entries = json::array();
  for (const auto& a : bundle.artifacts) {
    std::string bytes;
    if (a.kind == ArtifactKind::csv) {
      bytes = csv::write(a.table);
    } else {
      json doc;
      try {
        doc = json::parse(a.json);
      } catch (const json::parse_error& e) {
        throw Error(Errc::invalid_argument, "artifact '" + a.name + "' is not valid JSON: " + e.what());
      }
      if (!doc.is_object()) throw Error(Errc::invalid_argument, "artifact '" + a.name + "' must be a JSON object");
      doc["run_id"] = bundle.run_id;
      doc["inputs_digest"] = bundle.inputs_digest;
      bytes = doc.dump(2) + "\n";
    }
    const auto path = out_dir / a.name;
    write_file(path, bytes);
    written.push_back(path);
    manifest_entries.push_back({{"name", a.name},
                                {"kind", a.kind == ArtifactKind::csv ? "csv" : "json"},
                                {"sha256", scenario::sha256_hex(bytes)}});
  }
  const json manifest = {
      {"run_id", bundle.run_id}, {"inputs_digest", bundle.inputs_digest}, {"artifacts", manifest_entries}};
  const auto path = out_dir / "manifest.json";
  write_file(path, manifest.dump(2) + "\n");
  written.push_back(path);
  return written;
}

csv::Table flow_table(const netflow::FlowNetwork& net, const netflow::FlowAssignment& flow) {
  csv::Table t{{"from", "to", "capacity_kg", "flow_kg", "cost", "transit_time_h", "saturated"}, {}};
  for (std::size_t i = 0; i < net.edges().size(); ++i) {
    const auto& e = net.edges()[i];
    if (e.synthetic) continue;
    t.rows.push_back({net.id(e.from), net.id(e.to), std::to_string(e.capacity), std::to_string(flow.flow[i]),
                      format_number(e.cost.value()), format_number(e.transit_time_h),
                      flow.flow[i] == e.capacity ? "true" : "false"});
  }
  return t;
}

csv::Table wip_table(const queueing::RoutingModel& model, const queueing::WipReport& report) {
  csv::Table t{{"station", "kind", "arrival_rate", "service_rate", "utilization", "wip"}, {}};
  for (std::size_t i = 0; i < model.station_count(); ++i) {
    const auto& s = model.stations()[i];
    t.rows.push_back({s.id, s.kind == queueing::StationKind::transport ? "transport" : "process",
                      format_number(report.arrival_rates[i]), format_number(report.service_rates[i]),
                      format_number(report.utilizations[i]), format_number(report.per_station_wip[i])});
  }
  return t;
}

csv::Table monotonicity_table(const queueing::MonotonicityReport& report) {
  csv::Table t{{"claim", "component", "grid_line", "pass", "violating_points"}, {}};
  for (const auto& r : report.results) {
    t.rows.push_back(
        {r.claim, std::to_string(r.component), r.grid_line, r.pass ? "true" : "false", r.violating_points});
  }
  return t;
}

csv::Table constraint_table(const planner::ConstraintRecord& record) {
  csv::Table t{{"constraint", "pass", "measured", "limit", "note"}, {}};
  for (const auto& c : record.checks) {
    t.rows.push_back({c.name, c.pass ? "true" : "false", format_number(c.measured), format_number(c.limit), c.note});
  }
  return t;
}

csv::Table plan_table(const planner::PlanResult& result) {
  csv::Table t{{"config", "feasible", "v_star", "nominal_wip"}, {}};
  for (auto name : {planner::kFleetSize, planner::kNominalWip, planner::kWltpSum, planner::kWltpBounds,
                    planner::kDeltaWip, planner::kWipCap}) {
    t.header.push_back(std::string(name) + "_pass");
  }
  t.header.emplace_back("reason");
  for (const auto& o : result.examined) {
    std::vector<std::string> row{queueing::to_string(o.config), o.feasible ? "true" : "false",
                                 o.worst_case ? format_number(o.worst_case->v_star) : "",
                                 o.nominal_wip ? format_number(*o.nominal_wip) : ""};
    for (auto name : {planner::kFleetSize, planner::kNominalWip, planner::kWltpSum, planner::kWltpBounds,
                      planner::kDeltaWip, planner::kWipCap}) {
      const auto* check = o.constraints.find(name);
      row.emplace_back(check ? (check->pass ? "true" : "false") : "");
    }
    row.push_back(o.reason);
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table benchmark_table(const scheduler::BenchmarkTable& table) {
  csv::Table t{{"method", "task_type", "before_hours", "after_hours", "seed_count", "unoptimized_hours",
                "before_cost", "after_cost"},
               {}};
  for (const auto& r : table.rows) {
    t.rows.push_back({r.method, std::string(scheduler::to_string(r.task_type)), format_number(r.before_hours),
                      format_number(r.after_hours), std::to_string(r.seed_count),
                      format_number(r.unoptimized_hours), format_number(r.before_cost),
                      format_number(r.after_cost)});
  }
  return t;
}

csv::Table pareto_table(const scheduler::SchedulingProblem& problem, const scheduler::ParetoSet& front) {
  csv::Table t{{"member", "total_cost", "makespan_h", "productivity", "assignment"}, {}};
  for (std::size_t m = 0; m < front.members.size(); ++m) {
    const auto& member = front.members[m];
    std::string assignment;
    for (std::size_t k = 0; k < member.assignment.size(); ++k) {
      if (k > 0) assignment += ';';
      assignment += problem.tasks[k].id + ":" + problem.vehicles[member.assignment[k]].id;
    }
    t.rows.push_back({std::to_string(m), format_number(member.objectives.total_cost),
                      format_number(member.objectives.makespan), format_number(member.objectives.productivity),
                      assignment});
  }
  return t;
}

csv::Table schedule_table(const scheduler::SchedulingProblem& problem, const scheduler::ScheduleDetail& detail) {
  csv::Table t{{"task", "type", "vehicle", "round", "start_h", "completion_h"}, {}};
  for (std::size_t k = 0; k < detail.tasks.size(); ++k) {
    const auto& timing = detail.tasks[k];
    t.rows.push_back({problem.tasks[k].id, std::string(scheduler::to_string(problem.tasks[k].type)),
                      problem.vehicles[timing.vehicle].id, std::to_string(timing.round),
                      format_number(timing.start_h), format_number(timing.completion_h)});
  }
  return t;
}

std::string worst_case_json(const planner::WorstCase& worst_case, const queueing::FleetConfig& c) {
  json doc = worst_case_object(worst_case);
  doc["fleet"] = c.counts;
  return doc.dump();
}

std::string plan_json(const planner::PlanResult& result, const std::vector<std::string>& vehicle_types) {
  json examined = json::array();
  for (const auto& o : result.examined) {
    json entry = {{"fleet", o.config.counts},
                  {"feasible", o.feasible},
                  {"constraints", constraints_object(o.constraints)},
                  {"reason", o.reason}};
    entry["v_star"] = o.worst_case ? json(o.worst_case->v_star) : json(nullptr);
    entry["nominal_wip"] = o.nominal_wip ? json(*o.nominal_wip) : json(nullptr);
    examined.push_back(std::move(entry));
  }
  json doc = {{"vehicle_types", vehicle_types},
              {"c_star", result.c_star.counts},
              {"total_vehicles", result.c_star.total()},
              {"worst_case", worst_case_object(result.worst_case)},
              {"nominal_wip", result.nominal_wip},
              {"feasibility", constraints_object(result.feasibility)},
              {"search_mode", planner::to_string(result.mode)},
              {"examined", examined}};
  doc["exceedance_frequency"] = result.exceedance_frequency ? json(*result.exceedance_frequency) : json(nullptr);
  return doc.dump();
}

std::string improvements_json(const std::vector<scenario::ExpectedImprovement>& items) {
  json list = json::array();
  for (const auto& e : items) {
    list.push_back({{"id", e.id},
                    {"metric", e.metric},
                    {"percent", e.percent},
                    {"status", e.gated ? "gated" : "report_only"},
                    {"note", e.note}});
  }
  return json{{"expected_improvements", list}}.dump();
}

}  // namespace fabflow::report
