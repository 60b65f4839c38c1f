#include "athn/decompose.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "athn/error.hpp"
#include "athn/format.hpp"

namespace athn {

std::map<std::string, std::string> hub_regions(const Instance& instance) {
  std::map<std::string, std::string> out;
  for (const Hub& h : instance.hubs) {
    if (h.region) out[h.id] = *h.region;
  }
  return out;
}

RegionalResult solve_regional(const Instance& instance, const std::map<std::string, std::string>& region_of,
                              const SolverLimits& limits) {
  const TaskGraph full = build_task_graph(instance);
  TaskGraph graph = filter_regional(full, region_of);
  preprocess(graph);
  SolveResult solved = branch_and_bound(graph, limits);

  RegionalResult out;
  out.report = solved.report;
  for (const Route& r : solved.schedule.routes) {
    const Task& first = graph.task(r.tasks.front());
    ++out.trucks_per_region[region_of.at(graph.hub_ids()[first.h_plus])];
  }
  out.schedule = std::move(solved.schedule);
  return out;
}

std::size_t rolling_window_count(const Instance& instance, double horizon_hours) {
  if (!(horizon_hours > 0.0) || !std::isfinite(horizon_hours)) {
    throw Error(Errc::invalid_argument, "rolling horizon must be a positive number of hours");
  }
  double last = 0.0;
  for (const Load& l : instance.loads) last = std::max(last, l.release_hours);
  const double count = std::ceil(last / horizon_hours);
  return std::max<std::size_t>(1, static_cast<std::size_t>(count));
}

RollingResult solve_rolling(const Instance& instance, double horizon_hours, const SolverLimits& limits) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t count = rolling_window_count(instance, horizon_hours);
  TaskGraph full = build_task_graph(instance);
  preprocess(full);

  std::vector<std::vector<TaskId>> members(count);
  for (const Task& t : full.tasks()) {
    const double slot = std::floor(t.p / horizon_hours);
    const auto w = static_cast<std::size_t>(std::clamp(slot, 0.0, static_cast<double>(count - 1)));
    members[w].push_back(t.id);
  }

  RollingResult out;
  out.baseline = baseline_cost(full);
  double previous = out.baseline;
  std::vector<std::pair<TaskId, TaskId>> fixed;
  std::optional<Schedule> carried;
  TaskGraph last_graph = full;
  for (std::size_t w = 0; w < count; ++w) {
    TaskGraph window = filter_temporal(full, fixed, members[w]);
    SolverLimits lim = limits;
    // the schedule so far stays feasible, so the window never loses ground
    if (carried) lim.warm_incumbent = carried;
    SolveResult solved = branch_and_bound(window, lim);
    if (solved.report.reason == Termination::infeasible) {
      throw Error(Errc::invariant_violation, "rolling window " + std::to_string(w) + " has no feasible schedule");
    }

    WindowReport rep;
    rep.index = w;
    rep.begin_hours = static_cast<double>(w) * horizon_hours;
    rep.end_hours = static_cast<double>(w + 1) * horizon_hours;
    rep.tasks = members[w].size();
    rep.fixed_arcs = fixed.size();
    rep.objective = solved.schedule.objective;
    rep.objective_delta = solved.schedule.objective - previous;
    rep.report = solved.report;
    previous = solved.schedule.objective;
    out.windows.push_back(rep);

    fixed.clear();
    for (const Route& r : solved.schedule.routes) {
      TaskId prev = full.source();
      for (TaskId t : r.tasks) {
        fixed.emplace_back(prev, t);
        prev = t;
      }
    }
    carried = solved.schedule;
    last_graph = std::move(window);
  }

  out.accumulated_objective = out.baseline;
  for (const auto& w : out.windows) out.accumulated_objective += w.objective_delta;
  out.schedule = carried ? *carried : Schedule{};
  if (!carried) {
    for (const Task& t : full.tasks()) out.schedule.served_direct.push_back(t.id);
    out.schedule.objective = out.baseline;
  }
  validate_schedule(out.schedule, last_graph);
  validate_schedule(out.schedule, full);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

std::string comparison_csv(const std::vector<SchemeResult>& rows) {
  std::ostringstream out;
  out << "scheme,objective,loads_autonomous,solve_seconds\n";
  for (const auto& r : rows) {
    out << csv_field(r.scheme) << ',' << format_number(r.objective) << ',' << r.loads_autonomous << ','
        << format_number(r.solve_seconds) << '\n';
  }
  return out.str();
}

}  // namespace athn
