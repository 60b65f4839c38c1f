#include "athn/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "athn/error.hpp"
#include "athn/flow.hpp"

namespace athn {

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::optimal: return "optimal";
    case Termination::gap_limit: return "gap_limit";
    case Termination::node_limit: return "node_limit";
    case Termination::time_limit: return "time_limit";
    case Termination::infeasible: return "infeasible";
  }
  return "unknown";
}

double relative_gap(double upper, double lower) {
  if (!std::isfinite(upper) || !std::isfinite(lower)) return std::numeric_limits<double>::infinity();
  const double diff = std::max(0.0, upper - lower);
  if (diff == 0.0) return 0.0;
  if (upper == 0.0) return std::numeric_limits<double>::infinity();
  return diff / std::abs(upper);
}

bool tighten_for_fixed_arc(Window& tail, Window& head, double duration) {
  head.earliest = std::max(head.earliest, tail.earliest + duration);
  tail.latest = std::min(tail.latest, head.latest - duration);
  return tail.earliest <= tail.latest && head.earliest <= head.latest;
}

std::optional<Schedule> solve_delta0(const TaskGraph& graph) {
  TaskGraph rigid = with_delta(graph, 0.0);
  preprocess(rigid);
  for (const TaskArc& a : rigid.arcs()) {
    if (a.fixed && rigid.is_task(a.tail) && rigid.is_task(a.head) && a.time_constrained) return std::nullopt;
  }
  const FlowNetwork net = node_split(rigid);
  const FlowResult flow = min_cost_flow(net);
  if (!flow.feasible) return std::nullopt;
  const FlowDecomposition parts = decompose(net, flow);
  if (!parts.cycles.empty()) {
    throw Error(Errc::invariant_violation, "zero-flexibility relaxation produced a cycle");
  }
  Schedule s;
  for (const auto& path : parts.paths) {
    Route r;
    r.tasks = path;
    for (TaskId t : path) r.start.push_back(graph.task(t).p);
    s.routes.push_back(std::move(r));
  }
  std::vector<char> used(graph.task_count() + 1, 0);
  for (const Route& r : s.routes) {
    for (TaskId t : r.tasks) used[static_cast<std::size_t>(t)] = 1;
  }
  for (TaskId t = 1; t <= static_cast<TaskId>(graph.task_count()); ++t) {
    if (!used[static_cast<std::size_t>(t)]) s.served_direct.push_back(t);
  }
  s.objective = schedule_objective(s, graph);
  if (!schedule_violations(s, graph).empty()) return std::nullopt;
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kDiveRounds = 200;
constexpr std::size_t kDiveInterval = 200;

struct Node {
  double bound = -std::numeric_limits<double>::infinity();
  std::uint64_t id = 0;
  std::vector<std::size_t> deleted;                   // task-arc indices, sorted
  std::vector<std::size_t> fixed;                     // task-arc indices, sorted
  std::vector<std::pair<TaskId, Window>> windows;     // overrides of the root windows
  std::shared_ptr<const WarmStart> warm;
};

// min-heap on (bound, id)
struct WorseNode {
  bool operator()(const Node& x, const Node& y) const {
    return x.bound != y.bound ? x.bound > y.bound : x.id > y.id;
  }
};

class Search {
 public:
  Search(const TaskGraph& graph, const SolverLimits& limits)
      : graph_(graph),
        limits_(limits),
        trucks_(graph.params().max_trucks),
        baseline_(baseline_cost(graph)),
        root_windows_(task_windows(graph)),
        started_(Clock::now()) {
    for (std::size_t i = 0; i < graph.arcs().size(); ++i) {
      if (graph.arc(i).fixed) graph_fixed_.push_back(i);
    }
  }

  SolveResult run() {
    if (graph_fixed_.empty()) offer(Schedule{{}, all_tasks(), baseline_}, 0);

    if (trucks_ == 0) {
      // Without trucks only cycles could carry flow and no cycle is time
      // feasible, so serving everything directly is optimal.
      return finish(incumbent_ ? Termination::optimal : Termination::infeasible);
    }

    if (limits_.warm_incumbent) {
      Schedule warm = *limits_.warm_incumbent;
      warm.objective = schedule_objective(warm, graph_);
      offer(std::move(warm), 0);
    }
    if (limits_.mip_start) {
      ++relaxations_;
      if (auto s = solve_delta0(graph_)) offer(std::move(*s), 0);
    }
    if (graph_fixed_.empty()) {
      if (auto s = greedy_routes()) offer(std::move(*s), 0);
    }

    Node root;
    std::vector<Window> windows = root_windows_;
    if (!propagate(windows, {})) return finish(Termination::infeasible);
    root.windows = overrides(windows);
    root.id = next_id_++;
    heap_.push_back(std::move(root));
    searching_ = true;

    log_progress();

    const int threads = std::max(1, limits_.threads);
    if (threads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < threads; ++i) pool.emplace_back([this] { work(); });
      for (auto& t : pool) t.join();
    }

    if (stop_reason_) return finish(*stop_reason_);
    if (!incumbent_) return finish(Termination::infeasible);
    return finish(pruned_bound_ < upper_ - limits_.gap_tolerance ? Termination::gap_limit : Termination::optimal);
  }

 private:
  std::vector<TaskId> all_tasks() const {
    std::vector<TaskId> t;
    for (TaskId i = 1; i <= static_cast<TaskId>(graph_.task_count()); ++i) t.push_back(i);
    return t;
  }

  // Builds routes one truck at a time, each the cheapest chain through the
  // unused tasks taken in order of nominal pickup with earliest-start timing.
  std::optional<Schedule> greedy_routes() const {
    const auto n = static_cast<TaskId>(graph_.task_count());
    std::vector<TaskId> order = all_tasks();
    std::stable_sort(order.begin(), order.end(),
                     [&](TaskId x, TaskId y) { return graph_.task(x).p < graph_.task(y).p; });
    std::vector<std::size_t> rank(static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = i;

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    std::vector<double> value(static_cast<std::size_t>(n) + 1), start(static_cast<std::size_t>(n) + 1);
    std::vector<TaskId> pred(static_cast<std::size_t>(n) + 1);
    std::vector<std::vector<TaskId>> routes;
    for (int k = 0; k < trucks_; ++k) {
      std::fill(value.begin(), value.end(), inf);
      for (const TaskArc& a : graph_.out_arcs(graph_.source())) {
        const auto h = static_cast<std::size_t>(a.head);
        if (used[h]) continue;
        value[h] = a.cost;
        start[h] = root_windows_[h - 1].earliest;
        pred[h] = graph_.source();
      }
      TaskId best_end = graph_.source();
      double best = 0.0;
      for (TaskId t : order) {
        const auto ti = static_cast<std::size_t>(t);
        if (used[ti] || value[ti] == inf) continue;
        for (const TaskArc& a : graph_.out_arcs(t)) {
          if (a.head == graph_.sink()) {
            if (value[ti] + a.cost < best) {
              best = value[ti] + a.cost;
              best_end = t;
            }
            continue;
          }
          const auto h = static_cast<std::size_t>(a.head);
          if (used[h] || rank[h] < rank[ti]) continue;
          const Window& w = root_windows_[h - 1];
          const double x = a.time_constrained ? std::max(w.earliest, start[ti] + a.duration) : w.earliest;
          if (x > w.latest) continue;
          const double v = value[ti] + a.cost;
          if (v < value[h] || (v == value[h] && x < start[h])) {
            value[h] = v;
            start[h] = x;
            pred[h] = t;
          }
        }
      }
      if (best_end == graph_.source()) break;
      std::vector<TaskId> route;
      for (TaskId t = best_end; t != graph_.source(); t = pred[static_cast<std::size_t>(t)]) route.push_back(t);
      std::reverse(route.begin(), route.end());
      for (TaskId t : route) used[static_cast<std::size_t>(t)] = 1;
      routes.push_back(std::move(route));
    }
    try {
      return make_schedule(routes, graph_);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  double prune_margin() const {
    return std::max(limits_.gap_tolerance, limits_.relative_gap * std::abs(upper_));
  }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - started_).count(); }

  // caller holds mutex_ when running multi-threaded
  double global_lower_bound() const {
    if (!searching_) return -std::numeric_limits<double>::infinity();
    double lb = std::min(upper_, pruned_bound_);
    if (!heap_.empty()) lb = std::min(lb, heap_.front().bound);
    if (!in_flight_.empty()) lb = std::min(lb, *in_flight_.begin());
    return lb;
  }

  void log_progress() {
    if (!limits_.log) return;
    const double lb = global_lower_bound();
    if (lb == logged_lb_ && upper_ == logged_ub_) return;
    logged_lb_ = lb;
    logged_ub_ = upper_;
    *limits_.log << "node=" << nodes_ << " lb=" << std::setprecision(10) << lb << " ub=" << upper_
                 << " gap=" << std::setprecision(6) << 100.0 * relative_gap(upper_, lb) << "\n";
  }

  void offer(Schedule s, std::size_t) {
    if (!schedule_violations(s, graph_).empty()) return;
    if (incumbent_ && s.objective >= upper_ - 1e-12 * std::max(1.0, std::abs(upper_))) return;
    upper_ = s.objective;
    incumbent_ = std::move(s);
  }

  std::vector<std::pair<TaskId, Window>> overrides(const std::vector<Window>& windows) const {
    std::vector<std::pair<TaskId, Window>> out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (windows[i].earliest != root_windows_[i].earliest || windows[i].latest != root_windows_[i].latest) {
        out.emplace_back(static_cast<TaskId>(i + 1), windows[i]);
      }
    }
    return out;
  }

  // Tightens windows along every fixed task-task arc until nothing changes.
  bool propagate(std::vector<Window>& windows, const std::vector<std::size_t>& node_fixed) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto* list : std::array<const std::vector<std::size_t>*, 2>{&graph_fixed_, &node_fixed}) {
        for (std::size_t i : *list) {
          const TaskArc& a = graph_.arc(i);
          if (!graph_.is_task(a.tail) || !graph_.is_task(a.head)) continue;
          Window& tail = windows[static_cast<std::size_t>(a.tail - 1)];
          Window& head = windows[static_cast<std::size_t>(a.head - 1)];
          const Window before_tail = tail;
          const Window before_head = head;
          if (!tighten_for_fixed_arc(tail, head, a.duration)) return false;
          if (tail.latest != before_tail.latest || head.earliest != before_head.earliest) changed = true;
        }
      }
    }
    return true;
  }

  struct Outcome {
    std::vector<Node> children;
    std::optional<Schedule> candidate;
    std::optional<Schedule> repaired;
    bool solved = false;
    double bound = 0.0;
  };

  std::vector<Window> node_windows(const Node& node) const {
    std::vector<Window> windows = root_windows_;
    for (const auto& [t, w] : node.windows) windows[static_cast<std::size_t>(t - 1)] = w;
    return windows;
  }

  std::vector<ArcState> arc_states(const Node& node, const std::vector<Window>& windows) const {
    const std::size_t m = graph_.arcs().size();
    const std::size_t nodes = graph_.task_count() + 2;
    std::vector<ArcState> states(m, ArcState::free);
    std::vector<char> has_fixed_out(nodes, 0), has_fixed_in(nodes, 0);
    for (const auto* list : std::array<const std::vector<std::size_t>*, 2>{&graph_fixed_, &node.fixed}) {
      for (std::size_t i : *list) {
        states[i] = ArcState::fixed;
        has_fixed_out[static_cast<std::size_t>(graph_.arc(i).tail)] = 1;
        has_fixed_in[static_cast<std::size_t>(graph_.arc(i).head)] = 1;
      }
    }
    for (std::size_t i : node.deleted) states[i] = ArcState::absent;
    for (std::size_t i = 0; i < m; ++i) {
      if (states[i] != ArcState::free) continue;
      const TaskArc& a = graph_.arc(i);
      const bool tail_task = graph_.is_task(a.tail);
      const bool head_task = graph_.is_task(a.head);
      if ((tail_task && has_fixed_out[static_cast<std::size_t>(a.tail)]) ||
          (head_task && has_fixed_in[static_cast<std::size_t>(a.head)])) {
        states[i] = ArcState::absent;
      } else if (tail_task && head_task &&
                 windows[static_cast<std::size_t>(a.tail - 1)].earliest + a.duration >
                     windows[static_cast<std::size_t>(a.head - 1)].latest) {
        states[i] = ArcState::absent;
      }
    }
    return states;
  }

  struct Violations {
    bool feasible = true;
    std::optional<std::size_t> branch;  // most negative violating arc
    std::vector<std::size_t> culprits;  // one arc per infeasible route or cycle
  };

  Violations find_violations(const FlowDecomposition& parts, const std::vector<ArcState>& states,
                             const std::vector<Window>& windows) const {
    Violations v;
    auto better = [&](std::size_t cand, std::size_t best) {
      const TaskArc& c = graph_.arc(cand);
      const TaskArc& b = graph_.arc(best);
      return c.cost < b.cost || (c.cost == b.cost && std::make_pair(c.tail, c.head) < std::make_pair(b.tail, b.head));
    };
    auto consider = [&](std::size_t idx) {
      if (!v.branch || better(idx, *v.branch)) v.branch = idx;
    };
    auto free_arc = [&](TaskId tail, TaskId head) -> std::optional<std::size_t> {
      auto idx = graph_.find_arc(tail, head);
      if (!idx || states[*idx] == ArcState::fixed) return std::nullopt;
      return idx;
    };

    v.feasible = parts.cycles.empty();
    for (const auto& path : parts.paths) {
      const RouteTiming timing = check_route_time(path, graph_, windows);
      if (timing.feasible) continue;
      v.feasible = false;
      if (timing.violation == static_cast<std::size_t>(-1)) {
        throw Error(Errc::invariant_violation, "task window emptied without being pruned");
      }
      // walk back to the nearest arc that is not fixed
      std::size_t i = timing.violation + 1;
      while (i-- > 0) {
        if (auto idx = free_arc(path[i], path[i + 1])) {
          consider(*idx);
          v.culprits.push_back(*idx);
          break;
        }
      }
    }
    for (const auto& cycle : parts.cycles) {
      std::optional<std::size_t> costliest;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        auto idx = free_arc(cycle[i], cycle[(i + 1) % cycle.size()]);
        if (!idx) continue;
        consider(*idx);
        if (!costliest || graph_.arc(*idx).cost > graph_.arc(*costliest).cost) costliest = idx;
      }
      if (costliest) v.culprits.push_back(*costliest);
    }
    return v;
  }

  // Deletes the offending arc of every infeasible route and cycle and
  // re-solves until the relaxation is time feasible. Every intermediate
  // relaxation is repaired; the best schedule seen is returned.
  std::optional<Schedule> dive(std::vector<ArcState> states, const std::vector<Window>& windows,
                               const FlowNetwork& net, const FlowResult& flow,
                               const std::vector<std::size_t>& first_culprits) const {
    WarmStart warm = flow.warm_start(net);
    std::vector<std::size_t> culprits = first_culprits;
    std::optional<Schedule> best;
    for (int round = 0; round < kDiveRounds; ++round) {
      if (culprits.empty() || elapsed() >= limits_.time_limit_seconds) break;
      for (std::size_t i : culprits) states[i] = ArcState::absent;
      const FlowNetwork next = node_split(graph_, trucks_, &states);
      const FlowResult result = min_cost_flow(next, &warm);
      if (!result.feasible) break;
      const FlowDecomposition parts = decompose(next, result);
      const Violations v = find_violations(parts, states, windows);
      std::optional<Schedule> found = v.feasible ? make_schedule(parts.paths, graph_) : repair(parts);
      if (found && (!best || found->objective < best->objective)) best = std::move(found);
      if (v.feasible) break;
      culprits = v.culprits;
      warm = result.warm_start(next);
    }
    return best;
  }

  Outcome process(const Node& node, double upper_snapshot, double margin, bool run_dive) {
    Outcome out;
    const std::vector<Window> windows = node_windows(node);
    const std::vector<ArcState> states = arc_states(node, windows);

    const FlowNetwork net = node_split(graph_, trucks_, &states);
    const FlowResult flow = min_cost_flow(net, node.warm.get());
    out.solved = true;
    if (!flow.feasible) {
      out.bound = std::numeric_limits<double>::infinity();
      return out;
    }
    out.bound = baseline_ + flow.cost;
    if (out.bound >= upper_snapshot - margin) return out;

    const FlowDecomposition parts = decompose(net, flow);
    const Violations v = find_violations(parts, states, windows);
    if (v.feasible) {
      out.candidate = make_schedule(parts.paths, graph_);
      return out;
    }
    if (!v.branch) throw Error(Errc::invariant_violation, "infeasible relaxation without a branching arc");
    const std::optional<std::size_t> branch = v.branch;

    out.repaired = repair(parts);
    if (run_dive) {
      auto dived = dive(states, windows, net, flow, v.culprits);
      if (dived && (!out.repaired || dived->objective < out.repaired->objective)) out.repaired = std::move(dived);
    }

    auto warm = std::make_shared<const WarmStart>(flow.warm_start(net));
    Node del;
    del.bound = out.bound;
    del.deleted = node.deleted;
    del.deleted.insert(std::upper_bound(del.deleted.begin(), del.deleted.end(), *branch), *branch);
    del.fixed = node.fixed;
    del.windows = node.windows;
    del.warm = warm;
    out.children.push_back(std::move(del));

    Node fix;
    fix.bound = out.bound;
    fix.deleted = node.deleted;
    fix.fixed = node.fixed;
    fix.fixed.insert(std::upper_bound(fix.fixed.begin(), fix.fixed.end(), *branch), *branch);
    std::vector<Window> tightened = windows;
    if (propagate(tightened, fix.fixed)) {
      fix.windows = overrides(tightened);
      fix.warm = warm;
      out.children.push_back(std::move(fix));
    }
    return out;
  }

  // Turns a time-infeasible relaxation into schedules two ways: splitting
  // routes wherever the original windows are violated, and dropping the
  // offending tasks while keeping the chain. Cycles are opened at their most
  // expensive arc. The most profitable routes that fit in the fleet are kept.
  std::optional<Schedule> repair(const FlowDecomposition& parts) const {
    std::vector<std::vector<TaskId>> sequences = parts.paths;
    for (const auto& cycle : parts.cycles) {
      std::size_t cut = 0;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        auto idx = graph_.find_arc(cycle[i], cycle[(i + 1) % cycle.size()]);
        const double c = idx ? graph_.arc(*idx).cost : std::numeric_limits<double>::infinity();
        if (c > worst) {
          worst = c;
          cut = i;
        }
      }
      std::vector<TaskId> opened;
      for (std::size_t k = 1; k <= cycle.size(); ++k) opened.push_back(cycle[(cut + k) % cycle.size()]);
      sequences.push_back(std::move(opened));
    }

    std::optional<Schedule> best;
    for (const bool skip : {false, true}) {
      auto s = pack(fragments(sequences, skip));
      if (s && (!best || s->objective < best->objective)) best = std::move(s);
    }
    return best;
  }

  struct Fragment {
    std::vector<TaskId> tasks;
    double value;
  };

  std::vector<Fragment> fragments(const std::vector<std::vector<TaskId>>& sequences, bool skip) const {
    std::vector<Fragment> out;
    auto close = [&](std::vector<TaskId>& tasks) {
      while (!tasks.empty() && !graph_.find_arc(tasks.back(), graph_.sink())) tasks.pop_back();
      if (!tasks.empty() && graph_.find_arc(graph_.source(), tasks.front())) {
        double value = 0.0;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          const TaskId head = i + 1 < tasks.size() ? tasks[i + 1] : graph_.sink();
          value += graph_.arc(*graph_.find_arc(tasks[i], head)).cost;
        }
        out.push_back({tasks, value});
      }
      tasks.clear();
    };
    for (const auto& seq : sequences) {
      std::vector<TaskId> current;
      double last_start = 0.0;
      for (TaskId t : seq) {
        const Window& w = root_windows_[static_cast<std::size_t>(t - 1)];
        double x = w.earliest;
        if (current.empty() && !graph_.find_arc(graph_.source(), t)) continue;
        if (!current.empty()) {
          auto idx = graph_.find_arc(current.back(), t);
          if (idx) x = std::max(x, last_start + graph_.arc(*idx).duration);
          if (!idx || x > w.latest) {
            if (skip) continue;
            close(current);
            if (!graph_.find_arc(graph_.source(), t)) continue;
            x = w.earliest;
          }
        }
        current.push_back(t);
        last_start = x;
      }
      close(current);
    }
    return out;
  }

  std::optional<Schedule> pack(std::vector<Fragment> fragments) const {
    std::stable_sort(fragments.begin(), fragments.end(),
                     [](const Fragment& x, const Fragment& y) { return x.value < y.value; });
    std::vector<std::vector<TaskId>> chosen;
    std::vector<char> used(graph_.task_count() + 1, 0);
    for (const auto& f : fragments) {
      if (chosen.size() >= static_cast<std::size_t>(trucks_) || f.value >= 0.0) break;
      // a task can sit in a skip fragment and a later cycle fragment
      if (std::any_of(f.tasks.begin(), f.tasks.end(), [&](TaskId t) { return used[static_cast<std::size_t>(t)]; })) {
        continue;
      }
      for (TaskId t : f.tasks) used[static_cast<std::size_t>(t)] = 1;
      chosen.push_back(f.tasks);
    }
    try {
      return make_schedule(chosen, graph_);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void push_node(Node n) {
    n.id = next_id_++;
    heap_.push_back(std::move(n));
    std::push_heap(heap_.begin(), heap_.end(), WorseNode{});
  }

  void work() {
    std::unique_lock lock(mutex_);
    while (true) {
      cv_.wait(lock, [&] { return stop_reason_ || !heap_.empty() || in_flight_.empty(); });
      if (stop_reason_ || (heap_.empty() && in_flight_.empty())) break;

      if (elapsed() >= limits_.time_limit_seconds) {
        stop_reason_ = Termination::time_limit;
        break;
      }
      if (nodes_ >= limits_.node_limit) {
        stop_reason_ = Termination::node_limit;
        break;
      }
      if (limits_.relative_gap > 0.0 && incumbent_ &&
          relative_gap(upper_, global_lower_bound()) <= limits_.relative_gap) {
        // every open node is within the requested gap
        for (const Node& n : heap_) pruned_bound_ = std::min(pruned_bound_, n.bound);
        heap_.clear();
        if (in_flight_.empty()) break;
        continue;
      }

      std::pop_heap(heap_.begin(), heap_.end(), WorseNode{});
      Node node = std::move(heap_.back());
      heap_.pop_back();
      if (node.bound >= upper_ - prune_margin()) {
        if (node.bound < upper_) pruned_bound_ = std::min(pruned_bound_, node.bound);
        continue;
      }
      ++nodes_;
      ++relaxations_;
      auto slot = in_flight_.insert(node.bound);
      const double ub = upper_;
      const double margin = prune_margin();

      lock.unlock();
      const bool run_dive = nodes_ % kDiveInterval == 1;
      Outcome out = process(node, ub, margin, run_dive);
      lock.lock();

      in_flight_.erase(slot);
      std::vector<Node> children = std::move(out.children);
      for (auto* found : {&out.candidate, &out.repaired}) {
        if (*found) offer(std::move(**found), nodes_);
      }
      if (children.empty()) {
        if (std::isfinite(out.bound) && out.bound < upper_ && !out.candidate) {
          pruned_bound_ = std::min(pruned_bound_, out.bound);
        }
      }
      for (auto& child : children) {
        if (child.bound >= upper_ - prune_margin()) {
          if (child.bound < upper_) pruned_bound_ = std::min(pruned_bound_, child.bound);
          continue;
        }
        push_node(std::move(child));
      }
      log_progress();
      cv_.notify_all();
    }
    cv_.notify_all();
  }

  SolveResult finish(Termination reason) {
    SolveResult result;
    result.report.reason = reason;
    result.report.nodes = nodes_;
    result.report.relaxations = relaxations_;
    if (incumbent_) {
      result.schedule = postprocess_earliest(*incumbent_, graph_);
      result.report.upper_bound = upper_;
      double lb = global_lower_bound();
      if (reason == Termination::optimal) lb = upper_;
      result.report.lower_bound = lb;
      result.report.gap = relative_gap(upper_, lb);
    } else {
      result.report.upper_bound = std::numeric_limits<double>::infinity();
      result.report.lower_bound = reason == Termination::infeasible ? std::numeric_limits<double>::infinity()
                                                                     : global_lower_bound();
      result.report.gap = std::numeric_limits<double>::infinity();
    }
    result.report.seconds = elapsed();
    if (limits_.log && incumbent_ &&
        (result.report.lower_bound != logged_lb_ || upper_ != logged_ub_)) {
      *limits_.log << "node=" << nodes_ << " lb=" << std::setprecision(10) << result.report.lower_bound
                   << " ub=" << upper_ << " gap=" << std::setprecision(6) << 100.0 * result.report.gap << "\n";
    }
    return result;
  }

  const TaskGraph& graph_;
  const SolverLimits& limits_;
  const int trucks_;
  const double baseline_;
  const std::vector<Window> root_windows_;
  std::vector<std::size_t> graph_fixed_;
  const Clock::time_point started_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<Node> heap_;
  std::multiset<double> in_flight_;
  std::uint64_t next_id_ = 0;
  std::optional<Schedule> incumbent_;
  double upper_ = std::numeric_limits<double>::infinity();
  double pruned_bound_ = std::numeric_limits<double>::infinity();
  std::size_t nodes_ = 0;
  std::size_t relaxations_ = 0;
  std::optional<Termination> stop_reason_;
  bool searching_ = false;
  double logged_lb_ = std::numeric_limits<double>::quiet_NaN();
  double logged_ub_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

SolveResult branch_and_bound(const TaskGraph& graph, const SolverLimits& limits) {
  Search search(graph, limits);
  return search.run();
}

}  // namespace athn
