#pragma once

#include <map>
#include <string>
#include <vector>

#include "athn/instance.hpp"
#include "athn/solver.hpp"

namespace athn {

struct RegionalResult {
  Schedule schedule;
  SolveReport report;
  // trucks per region of the first task's origin hub
  std::map<std::string, int> trucks_per_region;
};

// One solve over the task graph without inter-region task arcs. region_of
// maps hub id -> region; every origin hub must be mapped.
RegionalResult solve_regional(const Instance& instance, const std::map<std::string, std::string>& region_of,
                              const SolverLimits& limits = {});

// Region labels carried on the instance's hubs.
std::map<std::string, std::string> hub_regions(const Instance& instance);

struct WindowReport {
  std::size_t index = 0;
  double begin_hours = 0.0;
  double end_hours = 0.0;
  std::size_t tasks = 0;       // tasks whose nominal pickup falls in the window
  std::size_t fixed_arcs = 0;  // arcs inherited from earlier windows
  double objective = 0.0;      // objective of the schedule after this window
  double objective_delta = 0.0;
  SolveReport report;
};

struct RollingResult {
  Schedule schedule;
  std::vector<WindowReport> windows;
  double baseline = 0.0;
  // baseline + sum of window deltas; equals schedule.objective
  double accumulated_objective = 0.0;
  double seconds = 0.0;
};

// Number of windows of length horizon_hours covering the release times; the
// last window also takes tasks whose pickup lies beyond the period.
std::size_t rolling_window_count(const Instance& instance, double horizon_hours);

RollingResult solve_rolling(const Instance& instance, double horizon_hours, const SolverLimits& limits = {});

struct SchemeResult {
  std::string scheme;
  double objective = 0.0;
  std::size_t loads_autonomous = 0;
  double solve_seconds = 0.0;
};

// `scheme,objective,loads_autonomous,solve_seconds`
std::string comparison_csv(const std::vector<SchemeResult>& rows);

}  // namespace athn
