#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "athn/task_graph.hpp"
#include "json.hpp"

namespace athn {

// Node-split view of a task graph. Task t becomes t_in = 2t - 1 and
// t_out = 2t joined by a unit-capacity internal arc; the source is node 0 and
// the sink node 2n + 1. The number of trucks leaving the source is capped by
// source_capacity.
struct FlowNetwork {
  static constexpr std::size_t kInternal = std::numeric_limits<std::size_t>::max();

  struct Arc {
    int from = 0;
    int to = 0;
    int capacity = 1;
    int lower = 0;  // 1 for arcs forced into the solution
    double cost = 0.0;
    std::size_t task_arc = kInternal;  // index into TaskGraph::arcs(), kInternal for t_in -> t_out
    TaskId task = 0;                   // owning task of an internal arc
  };

  int node_count = 2;
  int source_capacity = 0;
  std::vector<Arc> arcs;

  int source() const { return 0; }
  int sink() const { return node_count - 1; }
  static int in_node(TaskId t) { return 2 * t - 1; }
  static int out_node(TaskId t) { return 2 * t; }
  static TaskId task_of(int node) { return (node + 1) / 2; }
};

enum class ArcState : std::uint8_t { absent, free, fixed };

// Builds the split network. With `states` (parallel to graph.arcs()) arcs can
// be dropped or forced; otherwise every arc is present and arcs flagged fixed
// in the graph are forced.
FlowNetwork node_split(const TaskGraph& graph, int max_trucks, const std::vector<ArcState>* states = nullptr);
FlowNetwork node_split(const TaskGraph& graph);

// Previous optimum used to warm start a re-solve on a similar network: the
// task arcs that carried flow and the node potentials.
struct WarmStart {
  std::vector<std::size_t> task_arcs;
  std::vector<double> potentials;
};

struct FlowResult {
  bool feasible = false;
  std::vector<int> flow;  // per network arc
  double cost = 0.0;
  int trucks = 0;
  std::vector<double> potentials;
  std::size_t shortest_path_rounds = 0;

  WarmStart warm_start(const FlowNetwork& net) const;
};

// Minimum-cost circulation with the number of trucks at most source_capacity
// and free otherwise. Returns feasible = false only when forced arcs cannot be
// completed into a flow.
FlowResult min_cost_flow(const FlowNetwork& net, const WarmStart* warm = nullptr);

// Reduced cost c(u,v) + pi(u) - pi(v) of every residual arc. Used to verify
// optimality.
double min_residual_reduced_cost(const FlowNetwork& net, const FlowResult& result);

struct FlowDecomposition {
  std::vector<std::vector<TaskId>> paths;
  std::vector<std::vector<TaskId>> cycles;
};

FlowDecomposition decompose(const FlowNetwork& net, const FlowResult& result);

nlohmann::json flow_to_json(const FlowNetwork& net, const FlowResult& result);

}  // namespace athn
