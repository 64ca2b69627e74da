#include "min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

namespace pdmp::detail {

MinCostFlow::MinCostFlow(std::size_t nodes) : nodes_(nodes), graph_(nodes + 2) {}

void MinCostFlow::add_arc(std::size_t from, std::size_t to, double cost, double capacity) {
  if (from >= nodes_ || to >= nodes_) throw std::out_of_range("MinCostFlow::add_arc: node index");
  if (!(cost >= 0.0)) throw std::invalid_argument("MinCostFlow::add_arc: costs must be nonnegative");
  graph_[from].push_back({to, graph_[to].size(), capacity, cost, true});
  graph_[to].push_back({from, graph_[from].size() - 1, 0.0, -cost, false});
}

MinCostFlow::Solution MinCostFlow::solve(const std::vector<double>& supply, double negligible) {
  if (supply.size() != nodes_) throw std::invalid_argument("MinCostFlow::solve: supply size");
  const std::size_t source = nodes_;
  const std::size_t sink = nodes_ + 1;
  const std::size_t total_nodes = nodes_ + 2;

  // The super source/sink arcs are rebuilt on each solve.
  graph_[source].clear();
  graph_[sink].clear();
  for (std::size_t v = 0; v < nodes_; ++v) {
    auto& arcs = graph_[v];
    arcs.erase(std::remove_if(arcs.begin(), arcs.end(), [&](const Arc& a) { return a.to >= nodes_; }),
               arcs.end());
  }
  auto add_terminal = [&](std::size_t from, std::size_t to, double cap) {
    graph_[from].push_back({to, graph_[to].size(), cap, 0.0, false});
    graph_[to].push_back({from, graph_[from].size() - 1, 0.0, 0.0, false});
  };
  double total_supply = 0.0;
  for (std::size_t v = 0; v < nodes_; ++v) {
    if (supply[v] > negligible) {
      add_terminal(source, v, supply[v]);
      total_supply += supply[v];
    } else if (supply[v] < -negligible) {
      add_terminal(v, sink, -supply[v]);
    }
  }

  // Residual capacities below this are treated as saturated.
  const double cap_eps = 1e-15 * std::max(1.0, total_supply);
  std::vector<double> potential(total_nodes, 0.0);
  std::vector<double> dist(total_nodes);
  std::vector<std::size_t> prev_node(total_nodes), prev_arc(total_nodes);
  std::vector<char> done(total_nodes);
  using Entry = std::pair<double, std::size_t>;

  Solution sol;
  double routed = 0.0;
  while (routed < total_supply - cap_eps) {
    std::fill(dist.begin(), dist.end(), kUnbounded);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      if (u == sink) break;
      for (std::size_t i = 0; i < graph_[u].size(); ++i) {
        const Arc& a = graph_[u][i];
        if (a.capacity <= cap_eps || done[a.to]) continue;
        const double reduced = std::max(0.0, a.cost + potential[u] - potential[a.to]);
        const double nd = d + reduced;
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          prev_node[a.to] = u;
          prev_arc[a.to] = i;
          heap.emplace(nd, a.to);
        }
      }
    }
    if (!done[sink]) break;

    const double dsink = dist[sink];
    for (std::size_t v = 0; v < total_nodes; ++v) potential[v] += std::min(done[v] ? dist[v] : dsink, dsink);

    double push = kUnbounded;
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      push = std::min(push, graph_[prev_node[v]][prev_arc[v]].capacity);
    }
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      Arc& a = graph_[prev_node[v]][prev_arc[v]];
      a.capacity -= push;
      graph_[v][a.rev].capacity += push;
    }
    routed += push;
    ++sol.augmentations;
  }

  sol.unrouted = std::max(0.0, total_supply - routed);
  for (std::size_t u = 0; u < nodes_; ++u) {
    for (const Arc& a : graph_[u]) {
      if (a.original) sol.cost += a.cost * graph_[a.to][a.rev].capacity;
    }
  }
  sol.dual.resize(nodes_);
  for (std::size_t v = 0; v < nodes_; ++v) sol.dual[v] = -potential[v];
  return sol;
}

}  // namespace pdmp::detail
