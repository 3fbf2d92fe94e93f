#pragma once

// Report bundles: named CSV and JSON artifacts written to an output
// directory together with a manifest tying them to the scenario digest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fabflow/csv.hpp"
#include "fabflow/netflow.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/scenario.hpp"
#include "fabflow/scheduler.hpp"

namespace fabflow::report {

enum class ArtifactKind { csv, json };

struct Artifact {
  std::string name;  // file name, e.g. "flow.csv"
  ArtifactKind kind = ArtifactKind::csv;
  csv::Table table;   // kind == csv
  std::string json;   // kind == json; must hold a JSON object

  static Artifact make_csv(std::string name, csv::Table table);
  static Artifact make_json(std::string name, std::string text);
};

struct ReportBundle {
  std::string run_id;
  std::string inputs_digest;
  std::vector<Artifact> artifacts;
};

/// Deterministic run identifier from what determines the output.
std::string make_run_id(std::string_view stage, std::string_view inputs_digest, std::uint64_t seed);

/// Writes every artifact plus manifest.json and returns the paths written
/// (manifest last). JSON artifacts gain "run_id" and "inputs_digest" keys;
/// the manifest lists each artifact with its SHA-256. An empty bundle writes
/// nothing. Throws Error{io_error}.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& out_dir);

csv::Table flow_table(const netflow::FlowNetwork& net, const netflow::FlowAssignment& flow);
csv::Table wip_table(const queueing::RoutingModel& model, const queueing::WipReport& report);
/// Columns: claim, component, grid_line, pass, violating_points.
csv::Table monotonicity_table(const queueing::MonotonicityReport& report);
csv::Table constraint_table(const planner::ConstraintRecord& record);
/// One row per examined fleet: config, feasible, v_star, nominal_wip, then
/// one pass column per constraint and the rejection reason.
csv::Table plan_table(const planner::PlanResult& result);
/// Columns: method, task_type, before_hours, after_hours, seed_count, then
/// unoptimized_hours, before_cost, after_cost.
csv::Table benchmark_table(const scheduler::BenchmarkTable& table);
csv::Table pareto_table(const scheduler::SchedulingProblem& problem, const scheduler::ParetoSet& front);
csv::Table schedule_table(const scheduler::SchedulingProblem& problem, const scheduler::ScheduleDetail& detail);

std::string worst_case_json(const planner::WorstCase& worst_case, const queueing::FleetConfig& c);
std::string plan_json(const planner::PlanResult& result, const std::vector<std::string>& vehicle_types);
/// Published improvement figures, each flagged as gated or report-only.
std::string improvements_json(const std::vector<scenario::ExpectedImprovement>& items);

}  // namespace fabflow::report
