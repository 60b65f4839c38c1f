#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "athn/instance.hpp"
#include "athn/schedule.hpp"
#include "athn/task_graph.hpp"

namespace athn::test {

struct SmallConfig {
  int loads = 6;
  int hubs = 4;
  int trucks = 2;
  double delta = 1.0;
  double span_hours = 36.0;
  double box_degrees = 4.0;
  double alpha = 0.25;
  double beta = 0.25;
};

// Compact instance on a small lat/lon box so that chains are plausible within
// the release span.
inline Instance small_instance(std::uint64_t seed, const SmallConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(35.0, 35.0 + cfg.box_degrees), lon(-100.0, -100.0 + cfg.box_degrees),
      hour(0.0, cfg.span_hours);
  Instance inst;
  inst.distance_model = DistanceModel::synthetic();
  inst.params.delta_hours = cfg.delta;
  inst.params.alpha = cfg.alpha;
  inst.params.beta = cfg.beta;
  inst.params.max_trucks = cfg.trucks;
  for (int h = 0; h < cfg.hubs; ++h) inst.hubs.push_back({"H" + std::to_string(h + 1), {lat(rng), lon(rng)}, {}});
  for (int l = 0; l < cfg.loads; ++l) {
    Load load{"L" + std::to_string(l + 1), {lat(rng), lon(rng)}, {lat(rng), lon(rng)}, hour(rng)};
    inst.loads.push_back(load);
  }
  assign_all_hubs(inst);
  return inst;
}

// Exhaustive optimum computed from the instance alone: every task subset is
// tried in every order with earliest-start timing, then subsets are packed
// into at most K routes.
class BruteForce {
 public:
  explicit BruteForce(const Instance& inst) : inst_(inst), n_(static_cast<int>(inst.loads.size())) {
    const auto& prm = inst.params;
    const double inflate = 1.0 / (1.0 - prm.beta);
    for (int t = 0; t < n_; ++t) {
      const auto& hp = inst.hub_assignment[static_cast<std::size_t>(t)];
      const auto o = inst.origin_location(static_cast<std::size_t>(t));
      const auto d = inst.destination_location(static_cast<std::size_t>(t));
      const auto hplus = inst.hub_location(hp.origin_hub);
      const auto hminus = inst.hub_location(hp.destination_hub);
      const Leg first = inst.distance_model.travel(o, hplus);
      const Leg middle = inst.distance_model.travel(hplus, hminus);
      const Leg last = inst.distance_model.travel(hminus, d);
      const double direct = inst.distance_model.travel(o, d).km + inst.distance_model.travel(d, o).km;
      direct_.push_back(direct);
      serve_.push_back(inflate * (first.km + last.km) + (1.0 - prm.alpha) * middle.km - direct);
      p_.push_back(inst.loads[static_cast<std::size_t>(t)].release_hours + first.hours);
      busy_.push_back(2.0 * prm.service_hours + middle.hours);
    }
    reloc_km_.assign(static_cast<std::size_t>(n_ * n_), 0.0);
    reloc_h_.assign(static_cast<std::size_t>(n_ * n_), 0.0);
    for (int t = 0; t < n_; ++t) {
      for (int u = 0; u < n_; ++u) {
        const Leg r = inst.distance_model.travel(
            inst.hub_location(inst.hub_assignment[static_cast<std::size_t>(t)].destination_hub),
            inst.hub_location(inst.hub_assignment[static_cast<std::size_t>(u)].origin_hub));
        reloc_km_[static_cast<std::size_t>(t * n_ + u)] = r.km;
        reloc_h_[static_cast<std::size_t>(t * n_ + u)] = r.hours;
      }
    }
  }

  double baseline() const {
    double s = 0.0;
    for (double d : direct_) s += d;
    return s;
  }

  double optimum() {
    const std::size_t full = std::size_t{1} << n_;
    route_.assign(full, kInf);
    for (int t = 0; t < n_; ++t) {
      const double delta = inst_.params.delta_hours;
      extend(std::uint32_t{1} << t, t, p_[static_cast<std::size_t>(t)] - delta, serve_[static_cast<std::size_t>(t)]);
    }
    std::vector<double> best(full, kInf);
    best[0] = 0.0;
    for (int k = 0; k < inst_.params.max_trucks && k < n_; ++k) {
      std::vector<double> next = best;
      for (std::size_t m = 1; m < full; ++m) {
        const std::size_t low = m & (~m + 1);
        for (std::size_t s = m; s; s = (s - 1) & m) {
          if (!(s & low) || route_[s] == kInf || best[m ^ s] == kInf) continue;
          next[m] = std::min(next[m], route_[s] + best[m ^ s]);
        }
      }
      best = std::move(next);
    }
    double opt = 0.0;
    for (double v : best) opt = std::min(opt, v);
    return baseline() + opt;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  void extend(std::uint32_t mask, int last, double start, double cost) {
    const double delta = inst_.params.delta_hours;
    if (start > p_[static_cast<std::size_t>(last)] + delta) return;
    route_[mask] = std::min(route_[mask], cost);
    for (int u = 0; u < n_; ++u) {
      if (mask & (std::uint32_t{1} << u)) continue;
      const auto lu = static_cast<std::size_t>(last * n_ + u);
      const double arrive = start + busy_[static_cast<std::size_t>(last)] + reloc_h_[lu];
      const double x = std::max(arrive, p_[static_cast<std::size_t>(u)] - delta);
      extend(mask | (std::uint32_t{1} << u), u, x,
             cost + (1.0 - inst_.params.alpha) * reloc_km_[lu] + serve_[static_cast<std::size_t>(u)]);
    }
  }

  const Instance& inst_;
  int n_;
  std::vector<double> direct_, serve_, p_, busy_, reloc_km_, reloc_h_;
  std::vector<double> route_;
};

inline double brute_force_optimum(const Instance& inst) {
  BruteForce bf(inst);
  return bf.optimum();
}

}  // namespace athn::test

namespace athn::test {

struct ArcSpec {
  TaskId tail;
  TaskId head;
  double duration;
  double cost;
};

// Task graph with given nominal pickups and explicit arcs; one dummy hub so
// hub-based helpers still work.
inline TaskGraph manual_graph(const std::vector<double>& p, double delta, const std::vector<ArcSpec>& arcs,
                              int trucks = 1) {
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Task t;
    t.id = static_cast<TaskId>(i + 1);
    t.load = i;
    t.load_id = "L" + std::to_string(i + 1);
    t.p = p[i];
    t.a = p[i] - delta;
    t.b = p[i] + delta;
    tasks.push_back(t);
  }
  CostParams params;
  params.delta_hours = delta;
  params.max_trucks = trucks;
  const auto n = static_cast<TaskId>(p.size());
  std::vector<TaskArc> out;
  for (const ArcSpec& s : arcs) {
    TaskArc a;
    a.tail = s.tail;
    a.head = s.head;
    a.duration = s.duration;
    a.cost = s.cost;
    if (s.tail >= 1 && s.tail <= n && s.head >= 1 && s.head <= n) {
      a.time_constrained = true;
      a.big_m = big_m(p[static_cast<std::size_t>(s.tail - 1)], p[static_cast<std::size_t>(s.head - 1)], delta,
                      s.duration);
    }
    out.push_back(a);
  }
  return TaskGraph(std::move(tasks), std::move(out), {"H"}, {Leg{}}, params);
}

}  // namespace athn::test

namespace athn::test {

// Exhaustive optimum over the graph itself: every feasible chain of tasks
// (earliest-start timing over the graph's windows and durations) is priced
// with its source, task and sink arcs, then chains are packed into at most K
// disjoint routes. Fixed arcs are ignored.
inline double graph_optimum(const TaskGraph& g) {
  const auto n = static_cast<int>(g.task_count());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> route(full, kInf);
  auto arc = [&](TaskId u, TaskId v) -> const TaskArc* {
    auto i = g.find_arc(u, v);
    return i ? &g.arc(*i) : nullptr;
  };
  auto extend = [&](auto&& self, std::uint32_t mask, TaskId last, double start, double cost) -> void {
    if (start > g.task(last).b + 1e-9) return;
    if (const TaskArc* s = arc(last, g.sink())) route[mask] = std::min(route[mask], cost + s->cost);
    for (TaskId u = 1; u <= n; ++u) {
      if (mask & (std::uint32_t{1} << (u - 1))) continue;
      const TaskArc* a = arc(last, u);
      if (!a) continue;
      const double x = a->time_constrained ? std::max(start + a->duration, g.task(u).a) : g.task(u).a;
      self(self, mask | (std::uint32_t{1} << (u - 1)), u, x, cost + a->cost);
    }
  };
  for (TaskId t = 1; t <= n; ++t) {
    if (const TaskArc* s = arc(g.source(), t)) extend(extend, std::uint32_t{1} << (t - 1), t, g.task(t).a, s->cost);
  }
  std::vector<double> best(full, kInf);
  best[0] = 0.0;
  for (int k = 0; k < g.params().max_trucks && k < n; ++k) {
    std::vector<double> next = best;
    for (std::size_t m = 1; m < full; ++m) {
      const std::size_t low = m & (~m + 1);
      for (std::size_t s = m; s; s = (s - 1) & m) {
        if (!(s & low) || route[s] == kInf || best[m ^ s] == kInf) continue;
        next[m] = std::min(next[m], route[s] + best[m ^ s]);
      }
    }
    best = std::move(next);
  }
  double opt = 0.0;
  for (double v : best) opt = std::min(opt, v);
  return baseline_cost(g) + opt;
}

// Dense random task graph with tight windows: most arcs are attractive but
// only some chains are time feasible, so the relaxation has to branch.
inline TaskGraph random_windowed_graph(std::uint64_t seed, int n, int trucks, double delta) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hour(0.0, 2.0 * n), dur(2.0, 6.0), cost(-12.0, 2.0), back(-3.0, 1.0);
  std::vector<double> p;
  for (int t = 0; t < n; ++t) p.push_back(hour(rng));
  std::vector<ArcSpec> arcs;
  const auto sink = static_cast<TaskId>(n + 1);
  for (TaskId t = 1; t <= n; ++t) {
    arcs.push_back({0, t, 0, 0});
    arcs.push_back({t, sink, dur(rng), back(rng)});
    for (TaskId u = 1; u <= n; ++u) {
      if (u != t) arcs.push_back({t, u, dur(rng), cost(rng)});
    }
  }
  return manual_graph(p, delta, arcs, trucks);
}

}  // namespace athn::test
