#pragma once

#include <optional>
#include <string>
#include <vector>

#include "athn/instance.hpp"
#include "athn/schedule.hpp"
#include "athn/solver.hpp"
#include "athn/task_graph.hpp"
#include "json.hpp"

namespace athn {

struct StatsRow {
  std::string system;   // Current | ATHN
  std::string service;  // Direct | Autonomous
  std::size_t loads = 0;
  std::string segment;  // Full | Middle | First/last
  double km = 0.0;
  double empty_share = 0.0;  // fraction of km driven empty
  double cost_factor = 1.0;
  double cost = 0.0;
};

struct StatsTable {
  StatsRow current;
  StatsRow middle;
  StatsRow first_last;  // km includes the 1/(1 - beta) inflation
  StatsRow direct;
  double first_last_raw_km = 0.0;  // first/last km before inflation
  std::size_t athn_loads = 0;
  double athn_km = 0.0;
  double athn_cost = 0.0;
  double km_savings = 0.0;
  double km_savings_share = 0.0;
  double cost_savings = 0.0;
  double cost_savings_share = 0.0;
};

// Aggregate distances behind a stats table. first_last_km is already
// inflated, the way the summary table reports it.
struct KmFigures {
  std::size_t total_loads = 0;
  std::size_t autonomous_loads = 0;
  double current_km = 0.0;
  double middle_km = 0.0;
  double relocation_km = 0.0;  // part of middle_km driven empty
  double first_last_km = 0.0;
  double first_last_raw_km = 0.0;
  double direct_km = 0.0;
};

StatsTable stats_from_km(const KmFigures& km, const CostParams& params);
KmFigures schedule_km(const Schedule& schedule, const TaskGraph& graph);
StatsTable stats(const Schedule& schedule, const TaskGraph& graph);
StatsTable stats(const Schedule& schedule, const Instance& instance);

// rate_per_km adds a money column when set.
std::string stats_csv(const StatsTable& table, std::optional<double> rate_per_km = std::nullopt);

// `truck,task_id,kind,start_hours,end_hours`; relocation and idle rows carry
// the id of the task they lead to.
std::string export_gantt(const Schedule& schedule, const TaskGraph& graph);

// FeatureCollection with one LineString per middle-mile or relocation leg.
nlohmann::json export_routes_geojson(const Schedule& schedule, const TaskGraph& graph, const Instance& instance);

// Idle time over the summed span (first start to last task end) of all trucks.
double inactivity(const Schedule& schedule, const TaskGraph& graph);

enum class SweepDimension { trucks, delta, service, hubs };

SweepDimension parse_sweep_dimension(const std::string& name);
const char* to_string(SweepDimension dimension);

struct SweepPoint {
  double value = 0.0;
  double objective = 0.0;
  std::size_t loads_autonomous = 0;
  double inactivity = 0.0;  // fraction
  SolveReport report;
};

struct SweepOptions {
  // Candidate hub sites and clustering seed for the hubs dimension.
  std::vector<Hub> truck_stops;
  std::uint64_t seed = 1;
};

// Re-solves the instance for every value. K and delta sweeps run in the given
// order and hand each schedule to the next solve as a warm incumbent.
std::vector<SweepPoint> sweep(const Instance& instance, SweepDimension dimension, const std::vector<double>& values,
                              const SolverLimits& limits, const SweepOptions& options = {});

// `value,objective,loads_autonomous,inactivity%,gap` with the gap in percent.
std::string sweep_csv(const std::vector<SweepPoint>& points);

// Objective (left axis) and inactivity (right axis) against the swept value.
std::string sweep_svg(const std::vector<SweepPoint>& points, const std::string& x_label);

nlohmann::json report_to_json(const SolveReport& report);
nlohmann::json solution_to_json(const Schedule& schedule, const TaskGraph& graph, const SolveReport& report);
// Routes and start times as written by solution_to_json; direct loads are the
// complement and the objective is taken from the file.
Schedule schedule_from_json(const nlohmann::json& doc, const TaskGraph& graph);

}  // namespace athn
