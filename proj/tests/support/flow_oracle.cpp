#include "flow_oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace oracle {

using namespace strongtree;

double max_flow(const FlowGraph& graph, const CapacityAssignment& capacities) {
  const int sink = graph.num_vertices();  // super-sink
  const int V = sink + 1;
  std::vector<std::vector<double>> residual(V, std::vector<double>(V, 0.0));
  for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
    const Arc& arc = graph.arcs[a];
    const int to = graph.is_sink(arc.to) ? sink : arc.to;
    residual[arc.from][to] += capacities.capacity[a];
  }
  double flow = 0.0;
  for (;;) {
    std::vector<int> prev(V, -1);
    prev[0] = 0;
    std::deque<int> queue{0};
    while (!queue.empty() && prev[sink] < 0) {
      const int u = queue.front();
      queue.pop_front();
      for (int v = 0; v < V; ++v) {
        if (prev[v] < 0 && residual[u][v] > 1e-12) {
          prev[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (prev[sink] < 0) return flow;
    double push = std::numeric_limits<double>::infinity();
    for (int v = sink; v != 0; v = prev[v]) push = std::min(push, residual[prev[v]][v]);
    for (int v = sink; v != 0; v = prev[v]) {
      residual[prev[v]][v] -= push;
      residual[v][prev[v]] += push;
    }
    flow += push;
  }
}

std::vector<SourceSet> all_source_sets(const FlowGraph& graph) {
  const int nodes = tree_index::num_nodes(graph.depth);
  std::vector<SourceSet> out;
  for (long mask = 0; mask < (1L << nodes); ++mask) {
    SourceSet S;
    S.vertices.push_back(0);
    for (int n = 1; n <= nodes; ++n) {
      if ((mask >> (n - 1)) & 1) S.vertices.push_back(n);
    }
    out.push_back(std::move(S));
  }
  return out;
}

double min_cut_by_enumeration(const FlowGraph& graph, const CapacityAssignment& capacities) {
  double best = std::numeric_limits<double>::infinity();
  for (const SourceSet& S : all_source_sets(graph)) best = std::min(best, cut_capacity(S, graph, capacities));
  return best;
}

}  // namespace oracle
