#include "athn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "athn/error.hpp"

namespace athn {

namespace {

constexpr double kTimeTolerance = 1e-9;

}  // namespace

std::vector<Window> task_windows(const TaskGraph& graph) {
  std::vector<Window> w;
  w.reserve(graph.task_count());
  for (const Task& t : graph.tasks()) w.push_back({t.a, t.b});
  return w;
}

RouteTiming check_route_time(std::span<const TaskId> route, const TaskGraph& graph) {
  const auto windows = task_windows(graph);
  return check_route_time(route, graph, windows);
}

RouteTiming check_route_time(std::span<const TaskId> route, const TaskGraph& graph,
                             std::span<const Window> windows) {
  RouteTiming timing;
  timing.start.reserve(route.size());
  for (std::size_t i = 0; i < route.size(); ++i) {
    const Window& w = windows[static_cast<std::size_t>(route[i] - 1)];
    double x = w.earliest;
    if (i > 0) {
      auto arc = graph.find_arc(route[i - 1], route[i]);
      const double duration = arc ? graph.arc(*arc).duration : arc_duration(graph, route[i - 1], route[i]);
      x = std::max(x, timing.start.back() + duration);
    }
    if (x > w.latest) {
      timing.feasible = false;
      timing.violation = i == 0 ? static_cast<std::size_t>(-1) : i - 1;
      return timing;
    }
    timing.start.push_back(x);
  }
  return timing;
}

double baseline_cost(const TaskGraph& graph) {
  double total = 0.0;
  for (const Task& t : graph.tasks()) total += t.direct_cost;
  return total;
}

double schedule_objective(const Schedule& schedule, const TaskGraph& graph) {
  double total = baseline_cost(graph);
  for (const Route& r : schedule.routes) {
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
      const TaskId head = i + 1 < r.tasks.size() ? r.tasks[i + 1] : graph.sink();
      auto arc = graph.find_arc(r.tasks[i], head);
      total += arc ? graph.arc(*arc).cost : arc_cost(graph, r.tasks[i], head);
    }
  }
  return total;
}

namespace {

void fill_direct(Schedule& s, const TaskGraph& graph) {
  std::vector<char> used(graph.task_count() + 1, 0);
  for (const Route& r : s.routes) {
    for (TaskId t : r.tasks) used[static_cast<std::size_t>(t)] = 1;
  }
  s.served_direct.clear();
  for (TaskId t = 1; t <= static_cast<TaskId>(graph.task_count()); ++t) {
    if (!used[static_cast<std::size_t>(t)]) s.served_direct.push_back(t);
  }
}

}  // namespace

Schedule make_schedule(const std::vector<std::vector<TaskId>>& routes, const TaskGraph& graph) {
  Schedule s;
  for (const auto& tasks : routes) {
    if (tasks.empty()) continue;
    auto timing = check_route_time(tasks, graph);
    if (!timing.feasible) throw Error(Errc::invariant_violation, "route is not time feasible");
    s.routes.push_back({tasks, std::move(timing.start)});
  }
  fill_direct(s, graph);
  s.objective = schedule_objective(s, graph);
  return s;
}

Schedule postprocess_earliest(const Schedule& schedule, const TaskGraph& graph) {
  Schedule out = schedule;
  for (Route& r : out.routes) {
    auto timing = check_route_time(r.tasks, graph);
    if (!timing.feasible) throw Error(Errc::invariant_violation, "postprocessing an infeasible route");
    r.start = std::move(timing.start);
  }
  return out;
}

std::vector<std::string> schedule_violations(const Schedule& schedule, const TaskGraph& graph) {
  std::vector<std::string> issues;
  auto note = [&](const std::string& s) { issues.push_back(s); };
  const auto n = static_cast<TaskId>(graph.task_count());

  if (schedule.routes.size() > static_cast<std::size_t>(graph.params().max_trucks)) {
    note("uses " + std::to_string(schedule.routes.size()) + " trucks, limit " +
         std::to_string(graph.params().max_trucks));
  }
  std::vector<int> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::pair<TaskId, TaskId>> used_arcs;
  for (std::size_t k = 0; k < schedule.routes.size(); ++k) {
    const Route& r = schedule.routes[k];
    const std::string who = "route " + std::to_string(k);
    if (r.tasks.empty()) {
      note(who + " is empty");
      continue;
    }
    if (r.start.size() != r.tasks.size()) {
      note(who + " has " + std::to_string(r.start.size()) + " start times for " + std::to_string(r.tasks.size()) +
           " tasks");
      continue;
    }
    TaskId prev = graph.source();
    for (std::size_t i = 0; i <= r.tasks.size(); ++i) {
      const TaskId cur = i < r.tasks.size() ? r.tasks[i] : graph.sink();
      if (i < r.tasks.size() && !graph.is_task(cur)) {
        note(who + " visits unknown task " + std::to_string(cur));
        break;
      }
      auto arc = graph.find_arc(prev, cur);
      if (!arc) {
        note(who + " uses missing arc " + std::to_string(prev) + " -> " + std::to_string(cur));
      } else {
        used_arcs.emplace_back(prev, cur);
        if (graph.is_task(prev) && graph.is_task(cur) &&
            r.start[i] + kTimeTolerance < r.start[i - 1] + graph.arc(*arc).duration) {
          note(who + " breaks the chaining constraint on " + std::to_string(prev) + " -> " + std::to_string(cur));
        }
      }
      if (i < r.tasks.size()) {
        ++seen[static_cast<std::size_t>(cur)];
        const Task& t = graph.task(cur);
        if (r.start[i] + kTimeTolerance < t.a || r.start[i] - kTimeTolerance > t.b) {
          std::ostringstream msg;
          msg << who << " starts task " << cur << " at " << r.start[i] << " outside [" << t.a << ", " << t.b << "]";
          note(msg.str());
        }
      }
      prev = cur;
    }
  }
  for (TaskId t = 1; t <= n; ++t) {
    if (seen[static_cast<std::size_t>(t)] > 1) note("task " + std::to_string(t) + " is performed more than once");
  }
  std::vector<char> direct(static_cast<std::size_t>(n) + 1, 0);
  for (TaskId t : schedule.served_direct) {
    if (!graph.is_task(t)) {
      note("direct list names unknown task " + std::to_string(t));
      continue;
    }
    direct[static_cast<std::size_t>(t)] = 1;
  }
  for (TaskId t = 1; t <= n; ++t) {
    const bool on_route = seen[static_cast<std::size_t>(t)] > 0;
    if (on_route == static_cast<bool>(direct[static_cast<std::size_t>(t)])) {
      note("task " + std::to_string(t) + (on_route ? " is both routed and direct" : " is neither routed nor direct"));
    }
  }
  std::sort(used_arcs.begin(), used_arcs.end());
  for (const auto& f : graph.fixed_arcs()) {
    if (!std::binary_search(used_arcs.begin(), used_arcs.end(), f)) {
      note("fixed arc " + std::to_string(f.first) + " -> " + std::to_string(f.second) + " is not used");
    }
  }
  if (issues.empty()) {
    const double expected = schedule_objective(schedule, graph);
    const double tol = 1e-6 * std::max(1.0, std::abs(expected));
    if (std::abs(expected - schedule.objective) > tol) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "objective " << schedule.objective << " differs from recomputed " << expected;
      note(msg.str());
    }
  }
  return issues;
}

void validate_schedule(const Schedule& schedule, const TaskGraph& graph) {
  const auto issues = schedule_violations(schedule, graph);
  if (issues.empty()) return;
  std::string what = issues.front();
  if (issues.size() > 1) what += " (+" + std::to_string(issues.size() - 1) + " more)";
  throw Error(Errc::invariant_violation, what);
}

std::size_t autonomous_load_count(const Schedule& schedule) {
  std::size_t count = 0;
  for (const Route& r : schedule.routes) count += r.tasks.size();
  return count;
}

}  // namespace athn
