#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "athn/task_graph.hpp"

namespace athn {

struct Window {
  double earliest = 0.0;
  double latest = 0.0;
};

struct Route {
  std::vector<TaskId> tasks;
  std::vector<double> start;  // x_t, parallel to tasks
};

struct Schedule {
  std::vector<Route> routes;
  std::vector<TaskId> served_direct;  // ascending
  double objective = 0.0;             // km-equivalent, all loads
};

std::vector<Window> task_windows(const TaskGraph& graph);

// Earliest-start propagation along a chain of tasks. On failure `violation`
// is the index i of the arc (tasks[i], tasks[i+1]) whose head misses its
// deadline; a first task that cannot start at all reports index npos.
struct RouteTiming {
  bool feasible = true;
  std::vector<double> start;
  std::size_t violation = 0;
};

RouteTiming check_route_time(std::span<const TaskId> route, const TaskGraph& graph);
RouteTiming check_route_time(std::span<const TaskId> route, const TaskGraph& graph,
                             std::span<const Window> windows);

// Sum of baseline costs plus the cost of every arc on every route (source arc,
// task arcs, sink arc).
double schedule_objective(const Schedule& schedule, const TaskGraph& graph);
double baseline_cost(const TaskGraph& graph);

// Builds a schedule from task sequences: earliest start times, direct loads
// and objective. Routes must be time feasible.
Schedule make_schedule(const std::vector<std::vector<TaskId>>& routes, const TaskGraph& graph);

Schedule postprocess_earliest(const Schedule& schedule, const TaskGraph& graph);

// Every broken invariant as a readable message; empty when the schedule is
// valid for the graph (arcs exist, fixed arcs used, windows, chaining, truck
// count, objective identity).
std::vector<std::string> schedule_violations(const Schedule& schedule, const TaskGraph& graph);

// Throws Errc::invariant_violation listing the first violations.
void validate_schedule(const Schedule& schedule, const TaskGraph& graph);

std::size_t autonomous_load_count(const Schedule& schedule);

}  // namespace athn
