#include "athn/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "athn/error.hpp"

namespace athn {

FlowNetwork node_split(const TaskGraph& graph, int max_trucks, const std::vector<ArcState>* states) {
  const auto n = static_cast<TaskId>(graph.task_count());
  FlowNetwork net;
  net.node_count = 2 * n + 2;
  net.source_capacity = std::max(0, max_trucks);
  net.arcs.reserve(graph.arcs().size() + static_cast<std::size_t>(n));
  for (TaskId t = 1; t <= n; ++t) {
    FlowNetwork::Arc a;
    a.from = FlowNetwork::in_node(t);
    a.to = FlowNetwork::out_node(t);
    a.task = t;
    net.arcs.push_back(a);
  }
  for (std::size_t i = 0; i < graph.arcs().size(); ++i) {
    const TaskArc& ta = graph.arc(i);
    ArcState state = ta.fixed ? ArcState::fixed : ArcState::free;
    if (states) state = (*states)[i];
    if (state == ArcState::absent) continue;
    FlowNetwork::Arc a;
    a.from = ta.tail == graph.source() ? net.source() : FlowNetwork::out_node(ta.tail);
    a.to = ta.head == graph.sink() ? net.sink() : FlowNetwork::in_node(ta.head);
    a.lower = state == ArcState::fixed ? 1 : 0;
    a.cost = ta.cost;
    a.task_arc = i;
    a.task = ta.tail == graph.source() ? ta.head : ta.tail;
    net.arcs.push_back(a);
  }
  return net;
}

FlowNetwork node_split(const TaskGraph& graph) { return node_split(graph, graph.params().max_trucks); }

WarmStart FlowResult::warm_start(const FlowNetwork& net) const {
  WarmStart w;
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    if (flow[e] > 0 && net.arcs[e].task_arc != FlowNetwork::kInternal) w.task_arcs.push_back(net.arcs[e].task_arc);
  }
  w.potentials = potentials;
  return w;
}

namespace {

// Residual graph in compressed adjacency form. Arc e of the network owns the
// residual pair (fwd[e], bwd[e]); index arcs.size() is the sink -> source
// return arc bounding the number of trucks.
class Residual {
 public:
  struct Edge {
    int to;
    int cap;
    std::size_t rev;
    double cost;
  };

  Residual(const FlowNetwork& net, const std::vector<int>& initial_flow) : net_(net) {
    const std::size_t m = net.arcs.size() + 1;
    const auto nodes = static_cast<std::size_t>(net.node_count);
    begin_.assign(nodes + 1, 0);
    for (std::size_t e = 0; e < m; ++e) {
      auto [u, v] = endpoints(e);
      ++begin_[static_cast<std::size_t>(u) + 1];
      ++begin_[static_cast<std::size_t>(v) + 1];
    }
    for (std::size_t v = 0; v < nodes; ++v) begin_[v + 1] += begin_[v];
    edges_.resize(2 * m);
    fwd_.resize(m);
    bwd_.resize(m);
    std::vector<std::size_t> pos(begin_.begin(), begin_.end() - 1);
    for (std::size_t e = 0; e < m; ++e) {
      auto [u, v] = endpoints(e);
      const int cap = capacity(e);
      const int low = lower(e);
      const int f = std::clamp(initial_flow[e], low, cap);
      const double c = cost(e);
      const std::size_t i = pos[static_cast<std::size_t>(u)]++;
      const std::size_t j = pos[static_cast<std::size_t>(v)]++;
      edges_[i] = {v, cap - f, j, c};
      edges_[j] = {u, f - low, i, -c};
      fwd_[e] = i;
      bwd_[e] = j;
    }
  }

  std::pair<int, int> endpoints(std::size_t e) const {
    if (e < net_.arcs.size()) return {net_.arcs[e].from, net_.arcs[e].to};
    return {net_.sink(), net_.source()};
  }
  int capacity(std::size_t e) const { return e < net_.arcs.size() ? net_.arcs[e].capacity : net_.source_capacity; }
  int lower(std::size_t e) const { return e < net_.arcs.size() ? net_.arcs[e].lower : 0; }
  double cost(std::size_t e) const { return e < net_.arcs.size() ? net_.arcs[e].cost : 0.0; }
  int flow(std::size_t e) const { return lower(e) + edges_[bwd_[e]].cap; }

  std::size_t arc_count() const { return fwd_.size(); }
  std::size_t begin(int v) const { return begin_[static_cast<std::size_t>(v)]; }
  std::size_t end(int v) const { return begin_[static_cast<std::size_t>(v) + 1]; }
  Edge& edge(std::size_t i) { return edges_[i]; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }

  void push(std::size_t i, int amount) {
    edges_[i].cap -= amount;
    edges_[edges_[i].rev].cap += amount;
  }

 private:
  const FlowNetwork& net_;
  std::vector<std::size_t> begin_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> fwd_;
  std::vector<std::size_t> bwd_;
};

double cost_scale(const FlowNetwork& net) {
  double scale = 1.0;
  for (const auto& a : net.arcs) scale = std::max(scale, std::abs(a.cost));
  return scale;
}

// Potentials for a cold start: each t_out is raised so that its cheapest
// outgoing arc has reduced cost zero. Only internal arcs of profitable tasks
// then start with negative reduced cost.
std::vector<double> initial_potentials(const FlowNetwork& net) {
  std::vector<double> pi(static_cast<std::size_t>(net.node_count), 0.0);
  std::vector<double> cheapest(static_cast<std::size_t>(net.node_count), std::numeric_limits<double>::infinity());
  for (const auto& a : net.arcs) {
    if (a.from != net.source() && a.from % 2 == 0) {
      auto& c = cheapest[static_cast<std::size_t>(a.from)];
      c = std::min(c, a.cost);
    }
  }
  for (std::size_t v = 0; v < pi.size(); ++v) {
    if (std::isfinite(cheapest[v])) pi[v] = -cheapest[v];
  }
  return pi;
}

}  // namespace

FlowResult min_cost_flow(const FlowNetwork& net, const WarmStart* warm) {
  const auto nodes = static_cast<std::size_t>(net.node_count);
  const std::size_t m = net.arcs.size() + 1;

  std::vector<int> initial(m, 0);
  if (warm && !warm->task_arcs.empty()) {
    std::size_t max_index = 0;
    for (const auto& a : net.arcs) {
      if (a.task_arc != FlowNetwork::kInternal) max_index = std::max(max_index, a.task_arc);
    }
    std::vector<std::size_t> net_arc(max_index + 1, FlowNetwork::kInternal);
    for (std::size_t e = 0; e < net.arcs.size(); ++e) {
      if (net.arcs[e].task_arc != FlowNetwork::kInternal) net_arc[net.arcs[e].task_arc] = e;
    }
    std::vector<int> enters(nodes, 0);
    int trucks = 0;
    for (std::size_t ta : warm->task_arcs) {
      if (ta > max_index || net_arc[ta] == FlowNetwork::kInternal) continue;
      const std::size_t e = net_arc[ta];
      initial[e] = 1;
      enters[static_cast<std::size_t>(net.arcs[e].to)] = 1;
      if (net.arcs[e].from == net.source()) ++trucks;
    }
    for (std::size_t e = 0; e < net.arcs.size(); ++e) {
      if (net.arcs[e].task_arc == FlowNetwork::kInternal) initial[e] = enters[static_cast<std::size_t>(net.arcs[e].from)];
    }
    initial[m - 1] = std::min(trucks, net.source_capacity);
  }

  Residual res(net, initial);
  std::vector<double> pi;
  if (warm && warm->potentials.size() == nodes) {
    pi = warm->potentials;
  } else {
    pi = initial_potentials(net);
  }
  const double eps = 1e-9 * cost_scale(net);
  auto reduced = [&](int u, const Residual::Edge& edge) {
    return edge.cost + pi[static_cast<std::size_t>(u)] - pi[static_cast<std::size_t>(edge.to)];
  };

  std::vector<long> excess(nodes, 0);
  for (std::size_t e = 0; e < m; ++e) {
    auto [u, v] = res.endpoints(e);
    const int f = res.flow(e);
    excess[static_cast<std::size_t>(u)] -= f;
    excess[static_cast<std::size_t>(v)] += f;
  }

  // saturate residual arcs with negative reduced cost
  for (int u = 0; u < net.node_count; ++u) {
    for (std::size_t i = res.begin(u); i < res.end(u); ++i) {
      auto& edge = res.edge(i);
      if (edge.cap > 0 && reduced(u, edge) < -eps) {
        const int amount = edge.cap;
        excess[static_cast<std::size_t>(u)] -= amount;
        excess[static_cast<std::size_t>(edge.to)] += amount;
        res.push(i, amount);
      }
    }
  }

  FlowResult result;
  result.feasible = true;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes);
  std::vector<char> done(nodes);
  std::vector<int> level(nodes);
  std::vector<std::size_t> current(nodes);
  using Item = std::pair<double, int>;

  while (true) {
    std::vector<int> sources;
    for (std::size_t v = 0; v < nodes; ++v) {
      if (excess[v] > 0) sources.push_back(static_cast<int>(v));
    }
    if (sources.empty()) break;

    // Dijkstra on reduced costs from every excess node; stops at the first
    // deficit node settled.
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : sources) {
      dist[static_cast<std::size_t>(s)] = 0.0;
      heap.push({0.0, s});
    }
    double reach = inf;
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      const auto uu = static_cast<std::size_t>(u);
      if (done[uu]) continue;
      done[uu] = 1;
      if (excess[uu] < 0) {
        reach = d;
        break;
      }
      for (std::size_t i = res.begin(u); i < res.end(u); ++i) {
        const auto& edge = res.edge(i);
        if (edge.cap <= 0) continue;
        const auto vv = static_cast<std::size_t>(edge.to);
        if (done[vv]) continue;
        const double nd = d + std::max(0.0, reduced(u, edge));
        if (nd < dist[vv]) {
          dist[vv] = nd;
          heap.push({nd, edge.to});
        }
      }
    }
    ++result.shortest_path_rounds;
    if (!std::isfinite(reach)) {
      result.feasible = false;
      break;
    }
    for (std::size_t v = 0; v < nodes; ++v) pi[v] += done[v] ? dist[v] : reach;

    // blocking flows on the admissible subgraph
    while (true) {
      std::fill(level.begin(), level.end(), -1);
      std::queue<int> bfs;
      for (int s : sources) {
        if (excess[static_cast<std::size_t>(s)] > 0) {
          level[static_cast<std::size_t>(s)] = 0;
          bfs.push(s);
        }
      }
      bool found = false;
      while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        if (excess[static_cast<std::size_t>(u)] < 0) {
          found = true;
          continue;
        }
        for (std::size_t i = res.begin(u); i < res.end(u); ++i) {
          const auto& edge = res.edge(i);
          if (edge.cap <= 0 || level[static_cast<std::size_t>(edge.to)] != -1) continue;
          if (reduced(u, edge) > eps) continue;
          level[static_cast<std::size_t>(edge.to)] = level[static_cast<std::size_t>(u)] + 1;
          bfs.push(edge.to);
        }
      }
      if (!found) break;

      for (std::size_t v = 0; v < nodes; ++v) current[v] = res.begin(static_cast<int>(v));
      std::function<int(int, int)> dfs = [&](int u, int limit) -> int {
        const auto uu = static_cast<std::size_t>(u);
        if (excess[uu] < 0) {
          const int absorbed = static_cast<int>(std::min<long>(limit, -excess[uu]));
          excess[uu] += absorbed;
          return absorbed;
        }
        for (; current[uu] < res.end(u); ++current[uu]) {
          auto& edge = res.edge(current[uu]);
          if (edge.cap <= 0 || level[static_cast<std::size_t>(edge.to)] != level[uu] + 1) continue;
          if (reduced(u, edge) > eps) continue;
          const int got = dfs(edge.to, std::min(limit, edge.cap));
          if (got > 0) {
            res.push(current[uu], got);
            return got;
          }
        }
        level[uu] = -1;
        return 0;
      };
      bool pushed_any = false;
      for (int s : sources) {
        auto& ex = excess[static_cast<std::size_t>(s)];
        while (ex > 0 && level[static_cast<std::size_t>(s)] == 0) {
          const int got = dfs(s, static_cast<int>(std::min<long>(ex, std::numeric_limits<int>::max())));
          if (got == 0) break;
          ex -= got;
          pushed_any = true;
        }
      }
      if (!pushed_any) break;
    }
  }

  result.flow.resize(net.arcs.size());
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    result.flow[e] = res.flow(e);
    result.cost += result.flow[e] * net.arcs[e].cost;
  }
  result.trucks = res.flow(m - 1);
  result.potentials = std::move(pi);
  return result;
}

double min_residual_reduced_cost(const FlowNetwork& net, const FlowResult& result) {
  double worst = std::numeric_limits<double>::infinity();
  auto pi = [&](int v) { return result.potentials[static_cast<std::size_t>(v)]; };
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    const auto& a = net.arcs[e];
    const double rc = a.cost + pi(a.from) - pi(a.to);
    if (result.flow[e] < a.capacity) worst = std::min(worst, rc);
    if (result.flow[e] > a.lower) worst = std::min(worst, -rc);
  }
  const double rc_return = pi(net.sink()) - pi(net.source());
  if (result.trucks < net.source_capacity) worst = std::min(worst, rc_return);
  if (result.trucks > 0) worst = std::min(worst, -rc_return);
  return worst;
}

FlowDecomposition decompose(const FlowNetwork& net, const FlowResult& result) {
  const auto n = static_cast<TaskId>((net.node_count - 2) / 2);
  std::vector<TaskId> next(static_cast<std::size_t>(n) + 1, -1);  // -1 none, 0 sink
  std::vector<TaskId> starts;
  std::vector<char> busy(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    if (result.flow[e] <= 0) continue;
    const auto& a = net.arcs[e];
    if (a.task_arc == FlowNetwork::kInternal) {
      busy[static_cast<std::size_t>(a.task)] = 1;
      continue;
    }
    const TaskId head = a.to == net.sink() ? 0 : FlowNetwork::task_of(a.to);
    if (a.from == net.source()) {
      starts.push_back(head);
    } else {
      next[static_cast<std::size_t>(FlowNetwork::task_of(a.from))] = head;
    }
  }
  std::sort(starts.begin(), starts.end());

  FlowDecomposition out;
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (TaskId t : starts) {
    std::vector<TaskId> path;
    while (t > 0 && !seen[static_cast<std::size_t>(t)]) {
      seen[static_cast<std::size_t>(t)] = 1;
      path.push_back(t);
      t = next[static_cast<std::size_t>(t)];
    }
    out.paths.push_back(std::move(path));
  }
  for (TaskId s = 1; s <= n; ++s) {
    if (!busy[static_cast<std::size_t>(s)] || seen[static_cast<std::size_t>(s)]) continue;
    std::vector<TaskId> cycle;
    TaskId t = s;
    while (t > 0 && !seen[static_cast<std::size_t>(t)]) {
      seen[static_cast<std::size_t>(t)] = 1;
      cycle.push_back(t);
      t = next[static_cast<std::size_t>(t)];
    }
    if (t != s) throw Error(Errc::invariant_violation, "flow does not decompose into paths and cycles");
    out.cycles.push_back(std::move(cycle));
  }
  return out;
}

nlohmann::json flow_to_json(const FlowNetwork& net, const FlowResult& result) {
  nlohmann::json arcs = nlohmann::json::array();
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    if (result.flow[e] == 0) continue;
    arcs.push_back({{"from", net.arcs[e].from}, {"to", net.arcs[e].to}, {"flow", result.flow[e]}, {"cost", net.arcs[e].cost}});
  }
  const auto parts = decompose(net, result);
  return {{"feasible", result.feasible},
          {"cost", result.cost},
          {"trucks", result.trucks},
          {"arcs", arcs},
          {"paths", parts.paths},
          {"cycles", parts.cycles}};
}

}  // namespace athn
