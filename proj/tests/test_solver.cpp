#include <cmath>
#include <sstream>

#include "athn/error.hpp"
#include "athn/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace athn;
using athn::test::ArcSpec;
using athn::test::manual_graph;

namespace {

TaskGraph prepared(const Instance& inst) {
  TaskGraph g = build_task_graph(inst);
  preprocess(g);
  return g;
}

test::SmallConfig varied(std::uint64_t seed) {
  test::SmallConfig cfg;
  cfg.loads = 4 + static_cast<int>(seed % 4);
  cfg.hubs = 3 + static_cast<int>(seed % 3);
  cfg.trucks = 1 + static_cast<int>(seed % 3);
  const double deltas[] = {0.0, 1.0, 4.0};
  cfg.delta = deltas[(seed / 3) % 3];
  cfg.alpha = (seed % 5) * 0.15;
  cfg.beta = (seed % 2) * 0.2;
  cfg.span_hours = 12.0 + 8.0 * static_cast<double>(seed % 4);
  return cfg;
}

}  // namespace

TEST_CASE("route timing") {
  const TaskGraph tight = manual_graph({0, 2}, 0.0, {{1, 2, 3, -1}});
  const std::vector<TaskId> r{1, 2};
  const RouteTiming bad = check_route_time(r, tight);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.violation == 0);

  const TaskGraph g = manual_graph({0.5, 4.5, 9.5}, 0.5, {{1, 2, 4, -1}, {2, 3, 5, -1}});
  const std::vector<TaskId> chain{1, 2, 3};
  const RouteTiming ok = check_route_time(chain, g);
  REQUIRE(ok.feasible);
  CHECK(ok.start == std::vector<double>{0, 4, 9});

  const std::vector<Window> narrow{{0, 1}, {4, 4.5}, {9.2, 10}};
  const RouteTiming w = check_route_time(chain, g, narrow);
  REQUIRE(w.feasible);
  CHECK(w.start[2] == doctest::Approx(9.2));
}

TEST_CASE("window tightening for a fixed arc") {
  Window tail{0, 10}, head{2, 13};
  CHECK(tighten_for_fixed_arc(tail, head, 4));
  CHECK(tail.latest == 9);
  CHECK(head.earliest == 4);
  Window t2{5, 6}, h2{0, 8};
  CHECK_FALSE(tighten_for_fixed_arc(t2, h2, 4));
}

TEST_CASE("postprocessing moves starts to the earliest time") {
  const TaskGraph g = manual_graph({1, 5}, 1.0, {{0, 1, 0, 0}, {1, 2, 4, -3}, {2, 3, 1, -1}});
  Schedule s;
  s.routes = {{{1, 2}, {1, 6}}};
  s.objective = schedule_objective(s, g);
  REQUIRE(schedule_violations(s, g).empty());
  const Schedule e = postprocess_earliest(s, g);
  CHECK(e.routes[0].start == std::vector<double>{0, 4});
  CHECK(postprocess_earliest(e, g).routes[0].start == e.routes[0].start);
  CHECK(e.objective == s.objective);
}

TEST_CASE("zero flexibility solves at the root") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    test::SmallConfig cfg;
    cfg.loads = 7;
    cfg.delta = 0.0;
    const Instance inst = test::small_instance(seed, cfg);
    const SolveResult r = branch_and_bound(prepared(inst));
    CHECK(r.report.nodes == 1);
    CHECK(r.report.reason == Termination::optimal);
    CHECK(r.report.gap == 0.0);
    CHECK(r.schedule.objective == doctest::Approx(test::brute_force_optimum(inst)));
  }
}

TEST_CASE("branch and bound matches exhaustive search") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const Instance inst = test::small_instance(seed, varied(seed));
    const double oracle = test::brute_force_optimum(inst);
    CAPTURE(seed);

    const TaskGraph raw = build_task_graph(inst);
    const SolveResult a = branch_and_bound(raw);
    CHECK(a.report.reason == Termination::optimal);
    CHECK(a.schedule.objective == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(schedule_violations(a.schedule, raw).empty());

    const TaskGraph g = prepared(inst);
    SolverLimits limits;
    limits.mip_start = true;
    limits.threads = 1 + static_cast<int>(seed % 3);
    const SolveResult b = branch_and_bound(g, limits);
    CHECK(b.schedule.objective == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(schedule_violations(b.schedule, g).empty());
    CHECK(b.report.lower_bound <= b.report.upper_bound + 1e-9);

    const auto start = solve_delta0(g);
    REQUIRE(start);
    CHECK(schedule_violations(*start, g).empty());
    CHECK(start->objective >= oracle - 1e-9);
  }
}

TEST_CASE("branch and bound matches the graph oracle on tight windows") {
  std::size_t branched = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    const int trucks = 1 + static_cast<int>(seed % 3);
    const double delta = 0.5 * static_cast<double>(seed % 4);
    TaskGraph g = test::random_windowed_graph(seed, n, trucks, delta);
    const double oracle = test::graph_optimum(g);
    CAPTURE(seed);
    SolverLimits limits;
    limits.threads = seed % 4 == 0 ? 3 : 1;
    limits.mip_start = seed % 2 == 0;
    const SolveResult r = branch_and_bound(g, limits);
    CHECK(r.report.reason == Termination::optimal);
    CHECK(r.schedule.objective == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(schedule_violations(r.schedule, g).empty());
    preprocess(g);
    CHECK(branch_and_bound(g).schedule.objective == doctest::Approx(oracle).epsilon(1e-9));
    branched += r.report.nodes > 1;
  }
  MESSAGE("graphs that branched: " << branched);
  CHECK(branched >= 30);
}

TEST_CASE("more trucks and wider windows never hurt") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    test::SmallConfig cfg;
    cfg.loads = 7;
    cfg.trucks = 0;
    Instance inst = test::small_instance(seed, cfg);
    double prev = INFINITY;
    for (int k = 0; k <= 4; ++k) {
      inst.params.max_trucks = k;
      const double v = branch_and_bound(prepared(inst)).schedule.objective;
      if (k == 0) CHECK(v == doctest::Approx(baseline_cost(build_task_graph(inst))));
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
    inst.params.max_trucks = 2;
    prev = INFINITY;
    for (double d : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      inst.params.delta_hours = d;
      const double v = branch_and_bound(prepared(inst)).schedule.objective;
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("node limit reports honest bounds") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    test::SmallConfig cfg = varied(seed);
    cfg.delta = 2.0;
    cfg.loads = 8;
    const Instance inst = test::small_instance(seed, cfg);
    const double oracle = test::brute_force_optimum(inst);
    SolverLimits limits;
    limits.node_limit = 1;
    const TaskGraph g = prepared(inst);
    const SolveResult r = branch_and_bound(g, limits);
    CAPTURE(seed);
    CHECK(r.report.lower_bound <= oracle + 1e-7);
    CHECK(r.report.upper_bound >= oracle - 1e-7);
    CHECK(r.schedule.objective == doctest::Approx(r.report.upper_bound));
    CHECK(schedule_violations(r.schedule, g).empty());
    if (r.report.reason != Termination::optimal) CHECK(r.report.limit_reached());
  }
}

TEST_CASE("progress log") {
  const Instance inst = test::small_instance(3, {});
  std::ostringstream log;
  SolverLimits limits;
  limits.log = &log;
  branch_and_bound(prepared(inst), limits);
  CHECK(log.str().find("node=") != std::string::npos);
  CHECK(log.str().find("gap=") != std::string::npos);
}

TEST_CASE("relative gap") {
  CHECK(relative_gap(-100, -100) == 0.0);
  CHECK(relative_gap(-100, -110) == doctest::Approx(0.1));
  CHECK(std::isinf(relative_gap(-100, -INFINITY)));
}

TEST_CASE("time limit is honoured") {
  GeneratorConfig cfg;
  cfg.loads = 300;
  cfg.hubs = 10;
  cfg.params.max_trucks = 12;
  cfg.params.delta_hours = 8.0;
  const Instance inst = gen_synthetic(cfg, 2);
  TaskGraph g = build_task_graph(inst);
  preprocess(g);
  SolverLimits limits;
  limits.time_limit_seconds = 0.5;
  const SolveResult r = branch_and_bound(g, limits);
  CHECK(r.report.seconds < 0.5 + 1.0);
  if (r.report.reason != Termination::optimal) CHECK(r.report.reason == Termination::time_limit);
  CHECK(r.report.lower_bound <= r.report.upper_bound + 1e-6);
  CHECK(schedule_violations(r.schedule, g).empty());
}
