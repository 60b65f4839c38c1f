#include "athn/task_graph.hpp"

#include <algorithm>
#include <set>

#include "athn/error.hpp"

namespace athn {

namespace {

std::uint64_t pair_key(std::size_t from, std::size_t to) {
  return (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
}

}  // namespace

void LocationGraph::add(std::size_t from, std::size_t to, ArcKind kind, Leg leg) {
  index_.emplace(pair_key(from, to), arcs_.size());
  arcs_.push_back({from, to, kind, leg});
}

std::size_t LocationGraph::count(ArcKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [kind](const Arc& a) { return a.kind == kind; }));
}

Leg LocationGraph::leg(std::size_t from, std::size_t to) const {
  if (from == to) return {};
  auto it = index_.find(pair_key(from, to));
  if (it == index_.end()) {
    throw Error(Errc::invalid_argument, "no location arc " + vertices_.at(from).id + " -> " + vertices_.at(to).id);
  }
  return arcs_[it->second].leg;
}

LocationGraph build_location_graph(const Instance& instance) {
  LocationGraph g;
  const std::size_t hubs = instance.hubs.size();
  const std::size_t loads = instance.loads.size();
  g.hub_count_ = hubs;
  g.load_count_ = loads;

  std::vector<Location> locations;
  locations.reserve(hubs + 2 * loads);
  for (std::size_t h = 0; h < hubs; ++h) {
    locations.push_back(instance.hub_location(h));
    g.vertices_.push_back({locations.back().id, LocationGraph::VertexKind::hub, locations.back().point});
  }
  for (std::size_t l = 0; l < loads; ++l) {
    locations.push_back(instance.origin_location(l));
    g.vertices_.push_back({locations.back().id, LocationGraph::VertexKind::origin, locations.back().point});
    locations.push_back(instance.destination_location(l));
    g.vertices_.push_back({locations.back().id, LocationGraph::VertexKind::destination, locations.back().point});
  }

  const auto& model = instance.distance_model;
  auto travel = [&](std::size_t i, std::size_t j) { return model.travel(locations[i], locations[j]); };

  g.arcs_.reserve(2 * loads * hubs + hubs * hubs + 2 * loads);
  for (std::size_t l = 0; l < loads; ++l) {
    for (std::size_t h = 0; h < hubs; ++h) {
      g.add(g.origin_vertex(l), h, LocationGraph::ArcKind::first_mile, travel(g.origin_vertex(l), h));
    }
  }
  for (std::size_t i = 0; i < hubs; ++i) {
    for (std::size_t j = 0; j < hubs; ++j) {
      if (i != j) g.add(i, j, LocationGraph::ArcKind::middle_mile, travel(i, j));
    }
  }
  for (std::size_t h = 0; h < hubs; ++h) {
    for (std::size_t l = 0; l < loads; ++l) {
      g.add(h, g.destination_vertex(l), LocationGraph::ArcKind::last_mile, travel(h, g.destination_vertex(l)));
    }
  }
  for (std::size_t l = 0; l < loads; ++l) {
    const auto o = g.origin_vertex(l);
    const auto d = g.destination_vertex(l);
    g.add(o, d, LocationGraph::ArcKind::direct, travel(o, d));
    g.add(d, o, LocationGraph::ArcKind::direct_return, travel(d, o));
  }
  return g;
}

TaskGraph::TaskGraph(std::vector<Task> tasks, std::vector<TaskArc> arcs, std::vector<std::string> hub_ids,
                     std::vector<Leg> hub_legs, CostParams params)
    : tasks_(std::move(tasks)),
      arcs_(std::move(arcs)),
      hub_ids_(std::move(hub_ids)),
      hub_legs_(std::move(hub_legs)),
      params_(params) {
  index();
}

void TaskGraph::index() {
  std::sort(arcs_.begin(), arcs_.end(),
            [](const TaskArc& x, const TaskArc& y) { return x.tail != y.tail ? x.tail < y.tail : x.head < y.head; });
  const std::size_t nodes = tasks_.size() + 2;
  out_begin_.assign(nodes + 1, 0);
  for (const auto& a : arcs_) {
    if (a.tail < 0 || static_cast<std::size_t>(a.tail) >= nodes || a.head < 0 ||
        static_cast<std::size_t>(a.head) >= nodes || a.tail == a.head) {
      throw Error(Errc::invariant_violation, "task arc endpoint out of range");
    }
    ++out_begin_[static_cast<std::size_t>(a.tail) + 1];
  }
  for (std::size_t v = 0; v < nodes; ++v) out_begin_[v + 1] += out_begin_[v];
  for (std::size_t i = 1; i < arcs_.size(); ++i) {
    if (arcs_[i].tail == arcs_[i - 1].tail && arcs_[i].head == arcs_[i - 1].head) {
      throw Error(Errc::invariant_violation, "parallel task arcs");
    }
  }
}

std::span<const TaskArc> TaskGraph::out_arcs(TaskId tail) const {
  const auto v = static_cast<std::size_t>(tail);
  return {arcs_.data() + out_begin_[v], out_begin_[v + 1] - out_begin_[v]};
}

std::optional<std::size_t> TaskGraph::find_arc(TaskId tail, TaskId head) const {
  if (tail < 0 || tail > sink()) return std::nullopt;
  const auto v = static_cast<std::size_t>(tail);
  auto first = arcs_.begin() + static_cast<std::ptrdiff_t>(out_begin_[v]);
  auto last = arcs_.begin() + static_cast<std::ptrdiff_t>(out_begin_[v + 1]);
  auto it = std::lower_bound(first, last, head, [](const TaskArc& a, TaskId h) { return a.head < h; });
  if (it == last || it->head != head) return std::nullopt;
  return static_cast<std::size_t>(it - arcs_.begin());
}

std::size_t TaskGraph::time_constrained_count() const {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [](const TaskArc& a) { return a.time_constrained; }));
}

std::vector<std::pair<TaskId, TaskId>> TaskGraph::fixed_arcs() const {
  std::vector<std::pair<TaskId, TaskId>> out;
  for (const auto& a : arcs_) {
    if (a.fixed) out.emplace_back(a.tail, a.head);
  }
  return out;
}

void TaskGraph::erase_arcs(const std::vector<bool>& remove) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (!remove[i]) arcs_[w++] = arcs_[i];
  }
  arcs_.resize(w);
  index();
}

double arc_cost(const ArcLegs& legs, const CostParams& params, bool to_sink) {
  const double inflate = 1.0 / (1.0 - params.beta);
  const double autonomous = 1.0 - params.alpha;
  double cost = inflate * legs.first_km + autonomous * legs.middle_km + inflate * legs.last_km - legs.direct_km;
  if (!to_sink) cost += autonomous * legs.relocation_km;
  return cost;
}

double arc_cost(const TaskGraph& graph, TaskId tail, TaskId head) {
  if (tail == graph.source()) return 0.0;
  const Task& t = graph.task(tail);
  ArcLegs legs{t.first_km, t.middle_km, t.last_km, 0.0, t.direct_cost};
  const bool to_sink = head == graph.sink();
  if (!to_sink) legs.relocation_km = graph.hub_leg(t.h_minus, graph.task(head).h_plus).km;
  return arc_cost(legs, graph.params(), to_sink);
}

double arc_duration(const TaskGraph& graph, TaskId tail, TaskId head) {
  if (tail == graph.source()) return 0.0;
  const Task& t = graph.task(tail);
  const double service = graph.params().service_hours;
  double duration = 2.0 * service + t.middle_hours;
  if (head != graph.sink()) duration += graph.hub_leg(t.h_minus, graph.task(head).h_plus).hours;
  return duration;
}

double big_m(double p_tail, double p_head, double delta, double duration) {
  return p_tail - p_head + 2.0 * delta + duration;
}

TaskGraph build_task_graph(const Instance& instance) {
  return build_task_graph(instance, build_location_graph(instance));
}

TaskGraph build_task_graph(const Instance& instance, const LocationGraph& locations) {
  instance.validate();
  const auto& params = instance.params;
  const std::size_t n = instance.loads.size();
  const std::size_t hubs = instance.hubs.size();

  std::vector<std::string> hub_ids;
  for (const auto& h : instance.hubs) hub_ids.push_back(h.id);
  std::vector<Leg> hub_legs(hubs * hubs);
  for (std::size_t i = 0; i < hubs; ++i) {
    for (std::size_t j = 0; j < hubs; ++j) hub_legs[i * hubs + j] = locations.leg(i, j);
  }

  std::vector<Task> tasks;
  tasks.reserve(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto& pair = instance.hub_assignment[l];
    const auto o = locations.origin_vertex(l);
    const auto d = locations.destination_vertex(l);
    const Leg first = locations.leg(o, pair.origin_hub);
    const Leg middle = locations.leg(pair.origin_hub, pair.destination_hub);
    const Leg last = locations.leg(pair.destination_hub, d);
    Task t;
    t.id = static_cast<TaskId>(l + 1);
    t.load = l;
    t.load_id = instance.loads[l].id;
    t.h_plus = pair.origin_hub;
    t.h_minus = pair.destination_hub;
    t.p = instance.loads[l].release_hours + first.hours;
    t.a = t.p - params.delta_hours;
    t.b = t.p + params.delta_hours;
    t.first_km = first.km;
    t.middle_km = middle.km;
    t.last_km = last.km;
    t.middle_hours = middle.hours;
    t.direct_cost = locations.leg(o, d).km + locations.leg(d, o).km;
    tasks.push_back(std::move(t));
  }

  TaskGraph shell(tasks, {}, hub_ids, hub_legs, params);
  const auto sink = static_cast<TaskId>(n + 1);
  std::vector<TaskArc> arcs;
  arcs.reserve(n * (n + 1));
  for (TaskId t = 1; t <= static_cast<TaskId>(n); ++t) arcs.push_back({0, t, 0.0, 0.0, 0.0, false, false});
  for (const Task& t : tasks) {
    for (const Task& u : tasks) {
      if (u.id == t.id) continue;
      TaskArc a;
      a.tail = t.id;
      a.head = u.id;
      a.duration = arc_duration(shell, t.id, u.id);
      if (!(a.duration > 0.0)) {
        throw Error(Errc::invalid_argument, "task arc " + t.load_id + " -> " + u.load_id + " has zero duration");
      }
      a.cost = arc_cost(shell, t.id, u.id);
      a.big_m = big_m(t.p, u.p, params.delta_hours, a.duration);
      a.time_constrained = true;
      arcs.push_back(a);
    }
    arcs.push_back({t.id, sink, arc_duration(shell, t.id, sink), arc_cost(shell, t.id, sink), 0.0, false, false});
  }
  return TaskGraph(std::move(tasks), std::move(arcs), std::move(hub_ids), std::move(hub_legs), params);
}

TaskGraph with_delta(const TaskGraph& graph, double delta) {
  if (!(delta >= 0.0)) throw Error(Errc::invalid_argument, "delta must be >= 0");
  std::vector<Task> tasks = graph.tasks();
  for (auto& t : tasks) {
    t.a = t.p - delta;
    t.b = t.p + delta;
  }
  CostParams params = graph.params();
  params.delta_hours = delta;
  std::vector<Leg> hub_legs;
  const std::size_t hubs = graph.hub_ids().size();
  for (std::size_t i = 0; i < hubs; ++i) {
    for (std::size_t j = 0; j < hubs; ++j) hub_legs.push_back(graph.hub_leg(i, j));
  }
  std::vector<TaskArc> arcs = graph.arcs();
  for (auto& a : arcs) {
    if (graph.is_task(a.tail) && graph.is_task(a.head)) {
      a.big_m = big_m(graph.task(a.tail).p, graph.task(a.head).p, delta, a.duration);
      a.time_constrained = true;
    }
  }
  return TaskGraph(std::move(tasks), std::move(arcs), graph.hub_ids(), std::move(hub_legs), params);
}

PreprocessStats preprocess(TaskGraph& graph) {
  PreprocessStats stats;
  std::vector<bool> remove(graph.arcs().size(), false);
  for (std::size_t i = 0; i < graph.arcs().size(); ++i) {
    TaskArc& a = graph.mutable_arc(i);
    if (!graph.is_task(a.tail) || !graph.is_task(a.head)) continue;
    const Task& t = graph.task(a.tail);
    const Task& u = graph.task(a.head);
    if (t.a + a.duration > u.b && !a.fixed) {
      remove[i] = true;
      ++stats.arcs_removed;
    } else if (a.time_constrained && t.b + a.duration <= u.a) {
      a.time_constrained = false;
      ++stats.constraints_dropped;
    }
  }
  if (stats.arcs_removed > 0) graph.erase_arcs(remove);
  return stats;
}

TaskGraph filter_regional(const TaskGraph& graph, const std::map<std::string, std::string>& region_of) {
  std::vector<const std::string*> task_region(graph.task_count() + 2, nullptr);
  for (const Task& t : graph.tasks()) {
    const std::string& hub = graph.hub_ids().at(t.h_plus);
    auto it = region_of.find(hub);
    if (it == region_of.end()) throw Error(Errc::unmapped_hub, "hub " + hub + " has no region");
    task_region[static_cast<std::size_t>(t.id)] = &it->second;
  }
  return graph.filtered([&](const TaskArc& a) {
    if (!graph.is_task(a.tail) || !graph.is_task(a.head)) return true;
    return *task_region[static_cast<std::size_t>(a.tail)] == *task_region[static_cast<std::size_t>(a.head)];
  });
}

TaskGraph filter_temporal(const TaskGraph& graph, const std::vector<std::pair<TaskId, TaskId>>& fixed,
                          const std::vector<TaskId>& active_tasks) {
  const std::size_t nodes = graph.task_count() + 2;
  std::set<std::pair<TaskId, TaskId>> fixed_set(fixed.begin(), fixed.end());
  for (const auto& f : graph.fixed_arcs()) fixed_set.insert(f);

  std::vector<TaskId> fixed_next(nodes, -1);
  std::vector<TaskId> fixed_prev(nodes, -1);
  std::vector<TaskId> roots;
  for (const auto& [tail, head] : fixed_set) {
    if (!graph.find_arc(tail, head)) {
      throw Error(Errc::inconsistent_fixing,
                  "fixed arc " + std::to_string(tail) + " -> " + std::to_string(head) + " is not in the graph");
    }
    if (!graph.is_task(head)) throw Error(Errc::inconsistent_fixing, "fixed arcs may not enter the sink");
    if (fixed_prev[static_cast<std::size_t>(head)] != -1) {
      throw Error(Errc::inconsistent_fixing, "task " + std::to_string(head) + " has two fixed predecessors");
    }
    fixed_prev[static_cast<std::size_t>(head)] = tail;
    if (tail == graph.source()) {
      roots.push_back(head);
    } else {
      if (fixed_next[static_cast<std::size_t>(tail)] != -1) {
        throw Error(Errc::inconsistent_fixing, "task " + std::to_string(tail) + " has two fixed successors");
      }
      fixed_next[static_cast<std::size_t>(tail)] = head;
    }
  }

  // every fixed arc must lie on a path that starts at the source
  std::vector<bool> in_node_set(nodes, false);
  in_node_set[static_cast<std::size_t>(graph.source())] = true;
  in_node_set[static_cast<std::size_t>(graph.sink())] = true;
  std::size_t reached = 0;
  for (TaskId v : roots) {
    ++reached;
    while (fixed_next[static_cast<std::size_t>(v)] != -1) {
      v = fixed_next[static_cast<std::size_t>(v)];
      ++reached;
    }
    in_node_set[static_cast<std::size_t>(v)] = true;  // route endpoint
  }
  if (reached != fixed_set.size()) {
    throw Error(Errc::inconsistent_fixing, "fixed arcs do not form source-rooted disjoint paths");
  }
  for (TaskId t : active_tasks) {
    if (!graph.is_task(t)) throw Error(Errc::invalid_argument, "active task out of range");
    in_node_set[static_cast<std::size_t>(t)] = true;
  }

  TaskGraph out = graph.filtered([&](const TaskArc& a) {
    if (fixed_set.count({a.tail, a.head})) return true;
    if (!in_node_set[static_cast<std::size_t>(a.tail)] || !in_node_set[static_cast<std::size_t>(a.head)]) return false;
    // arcs into tasks with a fixed predecessor, or out of tasks with a fixed
    // successor, can never carry flow
    if (graph.is_task(a.head) && fixed_prev[static_cast<std::size_t>(a.head)] != -1) return false;
    if (graph.is_task(a.tail) && fixed_next[static_cast<std::size_t>(a.tail)] != -1) return false;
    return true;
  });
  for (std::size_t i = 0; i < out.arcs().size(); ++i) {
    TaskArc& a = out.mutable_arc(i);
    a.fixed = fixed_set.count({a.tail, a.head}) > 0;
  }
  return out;
}

nlohmann::json task_graph_to_json(const TaskGraph& graph) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const Task& t : graph.tasks()) {
    tasks.push_back({{"id", t.id},
                     {"load", t.load_id},
                     {"h_plus", graph.hub_ids()[t.h_plus]},
                     {"h_minus", graph.hub_ids()[t.h_minus]},
                     {"p", t.p},
                     {"a", t.a},
                     {"b", t.b},
                     {"direct_cost", t.direct_cost}});
  }
  nlohmann::json arcs = nlohmann::json::array();
  for (const TaskArc& a : graph.arcs()) {
    nlohmann::json j = {{"tail", a.tail}, {"head", a.head}, {"duration", a.duration}, {"cost", a.cost}};
    if (graph.is_task(a.tail) && graph.is_task(a.head)) {
      j["big_m"] = a.big_m;
      j["time_constrained"] = a.time_constrained;
    }
    if (a.fixed) j["fixed"] = true;
    arcs.push_back(j);
  }
  return {{"source", graph.source()},
          {"sink", graph.sink()},
          {"delta_hours", graph.params().delta_hours},
          {"service_hours", graph.params().service_hours},
          {"time_constrained_arcs", graph.time_constrained_count()},
          {"tasks", tasks},
          {"arcs", arcs}};
}

}  // namespace athn
