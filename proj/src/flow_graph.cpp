#include "strongtree/flow_graph.hpp"

#include <algorithm>

#include "strongtree/error.hpp"

namespace strongtree {

namespace tree_index {

int node_depth(int n) {
  int d = 0;
  while (n > 1) {
    n /= 2;
    ++d;
  }
  return d;
}

std::vector<int> ancestors(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tree nodes start at 1");
  std::vector<int> out;
  for (int m = parent(n); m >= 1; m = parent(m)) out.push_back(m);
  std::reverse(out.begin(), out.end());
  return out;
}

std::pair<std::vector<int>, std::vector<int>> left_right_ancestor_sets(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tree nodes start at 1");
  std::vector<int> went_left;
  std::vector<int> went_right;
  for (int child = n; child > 1; child = parent(child)) {
    (child % 2 == 0 ? went_left : went_right).push_back(parent(child));
  }
  std::reverse(went_left.begin(), went_left.end());
  std::reverse(went_right.begin(), went_right.end());
  return {went_left, went_right};
}

}  // namespace tree_index

const char* to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::Balanced: return "balanced";
    case GraphVariant::Imbalanced: return "imbalanced";
    case GraphVariant::Complete: return "complete";
  }
  return "?";
}

double AffineExpr::evaluate(std::span<const double> x) const {
  double v = constant;
  for (const Term& t : terms) v += t.coef * x[t.var];
  return v;
}

int FlowGraph::num_vertices() const {
  return tree_index::num_nodes(depth) + 1 + (variant == GraphVariant::Complete ? n_classes : 1);
}

std::string FlowGraph::vertex_name(int v) const {
  if (v == source()) return "s";
  if (!is_sink(v)) return std::to_string(v);
  if (variant == GraphVariant::Complete) return "t" + std::to_string(v - sink(0));
  return "t";
}

int FlowGraph::find_arc(int from, int to) const {
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].from == from && arcs[a].to == to) return static_cast<int>(a);
  }
  return -1;
}

FlowGraph build_graph(int depth, GraphVariant variant, int n_classes) {
  if (depth < 1) throw Error(ErrorCode::DepthTooSmall, "tree depth must be at least 1");
  if (variant == GraphVariant::Complete && n_classes < 2) {
    throw Error(ErrorCode::TooFewClasses, "the complete flow graph needs at least 2 classes");
  }
  FlowGraph g;
  g.depth = depth;
  g.variant = variant;
  g.n_classes = n_classes;
  using C = Arc::Capacity;
  g.arcs.push_back({g.source(), 1, C::Unit, 1, -1});
  for (int n = 1; n < tree_index::first_leaf(depth); ++n) {
    g.arcs.push_back({n, tree_index::left(n), C::Left, n, -1});
    g.arcs.push_back({n, tree_index::right(n), C::Right, n, -1});
  }
  const int first = variant == GraphVariant::Balanced ? tree_index::first_leaf(depth) : 1;
  for (int n = first; n <= tree_index::num_nodes(depth); ++n) {
    if (variant == GraphVariant::Complete) {
      for (int k = 0; k < n_classes; ++k) g.arcs.push_back({n, g.sink(k), C::Sink, n, k});
    } else {
      g.arcs.push_back({n, g.sink(), C::Sink, n, -1});
    }
  }
  return g;
}

AffineExpr arc_capacity(const FlowGraph& graph, const Arc& arc, std::span<const std::uint8_t> x, int y,
                        const SymbolTable& symbols) {
  (void)graph;
  AffineExpr e;
  switch (arc.capacity) {
    case Arc::Capacity::Unit:
      e.constant = 1.0;
      break;
    case Arc::Capacity::Left:
    case Arc::Capacity::Right: {
      const std::uint8_t want = arc.capacity == Arc::Capacity::Left ? 0 : 1;
      for (int f = 0; f < symbols.n_features; ++f) {
        if (x[f] == want) e.terms.push_back({symbols.b_at(arc.node, f), 1.0});
      }
      break;
    }
    case Arc::Capacity::Sink: {
      const int k = arc.cls >= 0 ? arc.cls : y;
      const int col = symbols.w_at(arc.node, k);
      if (col >= 0) e.terms.push_back({col, 1.0});
      break;
    }
  }
  return e;
}

TreeAssignment TreeAssignment::zeros(int depth, int n_features, int n_classes, bool with_p) {
  TreeAssignment t;
  t.depth = depth;
  t.n_features = n_features;
  t.n_classes = n_classes;
  const int nodes = tree_index::num_nodes(depth);
  t.b.assign(tree_index::first_leaf(depth), std::vector<double>(n_features, 0.0));
  t.w.assign(nodes + 1, std::vector<double>(n_classes, 0.0));
  if (with_p) t.p.assign(nodes + 1, 0.0);
  return t;
}

CapacityAssignment instantiate_capacities(const FlowGraph& graph, std::span<const std::uint8_t> x, int y,
                                          const TreeAssignment& tree, int datapoint) {
  if (tree.depth != graph.depth || static_cast<int>(x.size()) != tree.n_features ||
      static_cast<int>(tree.b.size()) != tree_index::first_leaf(graph.depth) ||
      static_cast<int>(tree.w.size()) != tree_index::num_nodes(graph.depth) + 1 || y < 0 ||
      y >= tree.n_classes) {
    throw Error(ErrorCode::DimensionMismatch, "tree assignment does not match the flow graph");
  }
  CapacityAssignment out;
  out.datapoint = datapoint;
  out.capacity.reserve(graph.arcs.size());
  for (const Arc& arc : graph.arcs) {
    double c = 0.0;
    switch (arc.capacity) {
      case Arc::Capacity::Unit: c = 1.0; break;
      case Arc::Capacity::Left:
      case Arc::Capacity::Right: {
        const std::uint8_t want = arc.capacity == Arc::Capacity::Left ? 0 : 1;
        for (int f = 0; f < tree.n_features; ++f) {
          if (x[f] == want) c += tree.b[arc.node][f];
        }
        break;
      }
      case Arc::Capacity::Sink: c = tree.w[arc.node][arc.cls >= 0 ? arc.cls : y]; break;
    }
    out.capacity.push_back(c);
  }
  return out;
}

}  // namespace strongtree
