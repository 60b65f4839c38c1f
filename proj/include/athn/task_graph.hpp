#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "athn/instance.hpp"
#include "json.hpp"

namespace athn {

// Hubs first, then one origin and one destination vertex per load.
class LocationGraph {
 public:
  enum class VertexKind { hub, origin, destination };
  enum class ArcKind { first_mile, middle_mile, last_mile, direct, direct_return };

  struct Vertex {
    std::string id;
    VertexKind kind;
    GeoPoint point;
  };

  struct Arc {
    std::size_t from;
    std::size_t to;
    ArcKind kind;
    Leg leg;
  };

  std::size_t hub_count() const { return hub_count_; }
  std::size_t load_count() const { return load_count_; }
  std::size_t hub_vertex(std::size_t hub) const { return hub; }
  std::size_t origin_vertex(std::size_t load) const { return hub_count_ + 2 * load; }
  std::size_t destination_vertex(std::size_t load) const { return hub_count_ + 2 * load + 1; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t count(ArcKind kind) const;

  // (0, 0) when from == to; throws Errc::invalid_argument for pairs that are
  // not arcs of the graph.
  Leg leg(std::size_t from, std::size_t to) const;

  friend LocationGraph build_location_graph(const Instance& instance);

 private:
  void add(std::size_t from, std::size_t to, ArcKind kind, Leg leg);

  std::size_t hub_count_ = 0;
  std::size_t load_count_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

LocationGraph build_location_graph(const Instance& instance);

using TaskId = int;

struct Task {
  TaskId id = 0;  // 1..n
  std::size_t load = 0;
  std::string load_id;
  std::size_t h_plus = 0;
  std::size_t h_minus = 0;
  double p = 0.0;  // nominal pickup at the origin hub
  double a = 0.0;  // earliest start
  double b = 0.0;  // latest start
  double first_km = 0.0;
  double middle_km = 0.0;
  double last_km = 0.0;
  double middle_hours = 0.0;
  double direct_cost = 0.0;  // round trip o -> d -> o
};

struct TaskArc {
  TaskId tail = 0;
  TaskId head = 0;
  double duration = 0.0;
  double cost = 0.0;
  double big_m = 0.0;  // task-task arcs only
  bool time_constrained = false;
  bool fixed = false;
};

struct PreprocessStats {
  std::size_t arcs_removed = 0;
  std::size_t constraints_dropped = 0;
};

// Node 0 is the source, tasks are 1..n and n+1 is the sink. Arcs are kept
// sorted by (tail, head) with at most one arc per ordered pair.
class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(std::vector<Task> tasks, std::vector<TaskArc> arcs, std::vector<std::string> hub_ids,
            std::vector<Leg> hub_legs, CostParams params);

  std::size_t task_count() const { return tasks_.size(); }
  TaskId source() const { return 0; }
  TaskId sink() const { return static_cast<TaskId>(tasks_.size()) + 1; }
  bool is_task(TaskId v) const { return v >= 1 && v <= static_cast<TaskId>(tasks_.size()); }

  const std::vector<Task>& tasks() const { return tasks_; }
  const Task& task(TaskId id) const { return tasks_.at(static_cast<std::size_t>(id - 1)); }
  const std::vector<TaskArc>& arcs() const { return arcs_; }
  const TaskArc& arc(std::size_t index) const { return arcs_[index]; }
  std::span<const TaskArc> out_arcs(TaskId tail) const;
  std::size_t out_begin(TaskId tail) const { return out_begin_[static_cast<std::size_t>(tail)]; }
  std::optional<std::size_t> find_arc(TaskId tail, TaskId head) const;

  const CostParams& params() const { return params_; }
  const std::vector<std::string>& hub_ids() const { return hub_ids_; }
  // Travel between hubs, row-major by hub index.
  Leg hub_leg(std::size_t from, std::size_t to) const { return hub_legs_[from * hub_ids_.size() + to]; }

  std::size_t time_constrained_count() const;
  std::vector<std::pair<TaskId, TaskId>> fixed_arcs() const;

  // Keeps the arcs for which keep(arc) is true.
  template <typename Pred>
  TaskGraph filtered(Pred keep) const {
    std::vector<TaskArc> kept;
    kept.reserve(arcs_.size());
    for (const auto& a : arcs_) {
      if (keep(a)) kept.push_back(a);
    }
    return TaskGraph(tasks_, std::move(kept), hub_ids_, hub_legs_, params_);
  }

  TaskArc& mutable_arc(std::size_t index) { return arcs_[index]; }
  void erase_arcs(const std::vector<bool>& remove);

 private:
  void index();

  std::vector<Task> tasks_;
  std::vector<TaskArc> arcs_;
  std::vector<std::size_t> out_begin_;
  std::vector<std::string> hub_ids_;
  std::vector<Leg> hub_legs_;
  CostParams params_;
};

// Legs entering the cost of one task arc, in km.
struct ArcLegs {
  double first_km = 0.0;
  double middle_km = 0.0;
  double last_km = 0.0;
  double relocation_km = 0.0;
  double direct_km = 0.0;  // baseline round trip
};

// Cost of a task arc relative to serving the tail load directly; the
// relocation term is dropped for sink arcs.
double arc_cost(const ArcLegs& legs, const CostParams& params, bool to_sink);

// Cost of the arc tail -> head in the task graph; 0 for source arcs.
double arc_cost(const TaskGraph& graph, TaskId tail, TaskId head);

double arc_duration(const TaskGraph& graph, TaskId tail, TaskId head);

double big_m(double p_tail, double p_head, double delta, double duration);

TaskGraph build_task_graph(const Instance& instance);
TaskGraph build_task_graph(const Instance& instance, const LocationGraph& locations);

// Resets every window to [p - delta, p + delta], recomputes big-M values and
// marks all task-task arcs time constrained again. Arcs are not restored.
TaskGraph with_delta(const TaskGraph& graph, double delta);

PreprocessStats preprocess(TaskGraph& graph);

// region_of maps hub id -> region label.
TaskGraph filter_regional(const TaskGraph& graph, const std::map<std::string, std::string>& region_of);

TaskGraph filter_temporal(const TaskGraph& graph, const std::vector<std::pair<TaskId, TaskId>>& fixed,
                          const std::vector<TaskId>& active_tasks);

nlohmann::json task_graph_to_json(const TaskGraph& graph);

}  // namespace athn
