#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

#include "athn/schedule.hpp"
#include "athn/task_graph.hpp"

namespace athn {

struct SolverLimits {
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  double gap_tolerance = 1e-9;  // absolute, on km-equivalent costs
  double relative_gap = 0.0;    // stop once (UB - LB) / |UB| drops to this
  bool mip_start = false;
  int threads = 1;
  std::ostream* log = nullptr;  // receives "node=.. lb=.. ub=.. gap=.." lines
  // Feasible schedule from a related solve (e.g. fewer trucks) used as the
  // first incumbent when it is valid for this graph.
  std::optional<Schedule> warm_incumbent;
};

enum class Termination { optimal, gap_limit, node_limit, time_limit, infeasible };

const char* to_string(Termination reason);

struct SolveReport {
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;  // fraction, (UB - LB) / |UB|
  std::size_t nodes = 0;
  std::size_t relaxations = 0;
  double seconds = 0.0;
  Termination reason = Termination::optimal;
  bool limit_reached() const { return reason == Termination::node_limit || reason == Termination::time_limit; }
};

double relative_gap(double upper, double lower);

struct SolveResult {
  Schedule schedule;
  SolveReport report;
};

// Optimal schedule of the zero-flexibility problem, returned with x_t = p(t).
// It is feasible for the graph's own windows. Empty when fixed arcs of the
// graph cannot be kept without flexibility.
std::optional<Schedule> solve_delta0(const TaskGraph& graph);

// Branch and bound over the node-split min-cost flow relaxation. Branches
// delete an arc or fix it and tighten the windows of its endpoints.
SolveResult branch_and_bound(const TaskGraph& graph, const SolverLimits& limits = {});

// Window tightening applied when arc tail -> head is fixed; false when the
// windows become empty.
bool tighten_for_fixed_arc(Window& tail, Window& head, double duration);

}  // namespace athn
