#include <cmath>

#include "athn/decompose.hpp"
#include "athn/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace athn;

namespace {

// Two clusters far apart, hubs H1..H(h/2) in the west and the rest in the east.
Instance two_cluster_instance(std::uint64_t seed, int loads_each, int hubs_each, int trucks) {
  test::SmallConfig cfg;
  cfg.loads = loads_each;
  cfg.hubs = hubs_each;
  cfg.trucks = trucks;
  Instance west = test::small_instance(seed, cfg);
  Instance east = test::small_instance(seed + 1000, cfg);
  for (auto& h : east.hubs) {
    h.id = "E" + h.id;
    h.location.lon += 20.0;
  }
  for (auto& l : east.loads) {
    l.id = "E" + l.id;
    l.origin.lon += 20.0;
    l.destination.lon += 20.0;
  }
  Instance inst = west;
  inst.hubs.insert(inst.hubs.end(), east.hubs.begin(), east.hubs.end());
  inst.loads.insert(inst.loads.end(), east.loads.begin(), east.loads.end());
  assign_all_hubs(inst);
  return inst;
}

std::map<std::string, std::string> by_prefix(const Instance& inst) {
  std::map<std::string, std::string> m;
  for (const auto& h : inst.hubs) m[h.id] = h.id[0] == 'E' ? "east" : "west";
  return m;
}

}  // namespace

TEST_CASE("one region is the global problem") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = test::small_instance(seed, {});
    std::map<std::string, std::string> one;
    for (const auto& h : inst.hubs) one[h.id] = "all";
    const RegionalResult r = solve_regional(inst, one);
    CHECK(r.schedule.objective == doctest::Approx(test::brute_force_optimum(inst)));
    int trucks = 0;
    for (const auto& [_, k] : r.trucks_per_region) trucks += k;
    CHECK(trucks == static_cast<int>(r.schedule.routes.size()));
  }
}

TEST_CASE("regional solve matches the filtered oracle") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Instance inst = two_cluster_instance(seed, 4, 2, 1 + static_cast<int>(seed % 3));
    const auto regions = by_prefix(inst);
    const RegionalResult r = solve_regional(inst, regions);
    const TaskGraph g = filter_regional(build_task_graph(inst), regions);
    CAPTURE(seed);
    CHECK(r.schedule.objective == doctest::Approx(test::graph_optimum(g)));
    CHECK(schedule_violations(r.schedule, g).empty());
    CHECK(r.schedule.objective >= test::brute_force_optimum(inst) - 1e-7);
    for (const Route& route : r.schedule.routes) {
      const bool east = inst.loads[static_cast<std::size_t>(route.tasks.front() - 1)].id[0] == 'E';
      for (TaskId t : route.tasks) CHECK((inst.loads[static_cast<std::size_t>(t - 1)].id[0] == 'E') == east);
    }
  }
}

TEST_CASE("unmapped hub is rejected") {
  const Instance inst = test::small_instance(1, {});
  try {
    solve_regional(inst, {{inst.hubs[0].id, "x"}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unmapped_hub);
  }
}

TEST_CASE("rolling horizon") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    test::SmallConfig cfg;
    cfg.loads = 7;
    cfg.span_hours = 48.0;
    cfg.delta = static_cast<double>(seed % 3);
    const Instance inst = test::small_instance(seed, cfg);
    const double oracle = test::brute_force_optimum(inst);
    CAPTURE(seed);

    const RollingResult once = solve_rolling(inst, 1000.0);
    CHECK(once.windows.size() == 1);
    CHECK(once.schedule.objective == doctest::Approx(oracle));

    for (double h : {24.0, 12.0, 5.0}) {
      const RollingResult r = solve_rolling(inst, h);
      CHECK(r.schedule.objective >= oracle - 1e-7);
      CHECK(r.accumulated_objective == doctest::Approx(r.schedule.objective));
      CHECK(schedule_violations(r.schedule, build_task_graph(inst)).empty());
      std::size_t tasks = 0;
      for (const auto& w : r.windows) tasks += w.tasks;
      CHECK(tasks == inst.loads.size());
    }
  }
}

TEST_CASE("rolling over four weeks") {
  GeneratorConfig cfg;
  cfg.loads = 150;
  cfg.hubs = 8;
  cfg.truck_stops = 60;
  cfg.params.max_trucks = 6;
  const Instance inst = gen_synthetic(cfg, 11);
  double latest = 0.0;
  for (const auto& l : inst.loads) latest = std::max(latest, l.release_hours);
  const std::size_t count = rolling_window_count(inst, 24.0);
  CHECK(count == static_cast<std::size_t>(std::ceil(latest / 24.0)));
  CHECK(count == 28);

  const RollingResult r = solve_rolling(inst, 24.0);
  REQUIRE(r.windows.size() == count);
  std::size_t prev_fixed = 0;
  for (const auto& w : r.windows) {
    CHECK(w.fixed_arcs >= prev_fixed);
    prev_fixed = w.fixed_arcs;
    CHECK(w.objective_delta <= 1e-7);
  }
  CHECK(r.accumulated_objective == doctest::Approx(r.schedule.objective));
  CHECK(r.schedule.objective <= r.baseline);
  CHECK(schedule_violations(r.schedule, build_task_graph(inst)).empty());

  CHECK_THROWS_AS(rolling_window_count(inst, 0.0), Error);
  CHECK_THROWS_AS(rolling_window_count(inst, NAN), Error);
}

TEST_CASE("comparison table") {
  const std::string csv = comparison_csv({{"global", -1234.5, 10, 0.25}, {"rolling, 24h", -1200, 9, 0.125}});
  CHECK(csv == "scheme,objective,loads_autonomous,solve_seconds\n"
               "global,-1234.5,10,0.25\n"
               "\"rolling, 24h\",-1200,9,0.125\n");
}
