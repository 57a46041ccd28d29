#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strongtree/linear_model.hpp"

namespace strongtree {

// Heap-indexed complete binary tree of depth d: branching nodes 1..2^d-1,
// terminal nodes 2^d..2^{d+1}-1.
namespace tree_index {

inline int first_leaf(int depth) { return 1 << depth; }
inline int num_branching(int depth) { return (1 << depth) - 1; }
inline int num_nodes(int depth) { return (1 << (depth + 1)) - 1; }
inline int left(int n) { return 2 * n; }
inline int right(int n) { return 2 * n + 1; }
inline int parent(int n) { return n / 2; }  // 0 stands for the source
inline bool is_branching(int n, int depth) { return n >= 1 && n < first_leaf(depth); }
inline bool is_terminal(int n, int depth) { return n >= first_leaf(depth) && n <= num_nodes(depth); }
int node_depth(int n);

/// Root-first path to n, excluding n.
std::vector<int> ancestors(int n);
/// Ancestors whose left (first) or right (second) branch leads to n.
std::pair<std::vector<int>, std::vector<int>> left_right_ancestor_sets(int n);

}  // namespace tree_index

enum class GraphVariant { Balanced, Imbalanced, Complete };

const char* to_string(GraphVariant v);

/// Column indices of the decision symbols b_{nf} and w^n_k in some LinearModel.
/// Missing symbols are -1 (e.g. w at branching nodes of a balanced tree).
struct SymbolTable {
  int depth = 0;
  int n_features = 0;
  int n_classes = 0;
  std::vector<std::vector<int>> b;  // [node][feature], node in 1..2^d-1
  std::vector<std::vector<int>> w;  // [node][class], node in 1..2^{d+1}-1

  int b_at(int n, int f) const { return b[n][f]; }
  int w_at(int n, int k) const { return w[n][k]; }
};

struct AffineExpr {
  double constant = 0.0;
  std::vector<Term> terms;

  double evaluate(std::span<const double> x) const;
};

struct Arc {
  enum class Capacity { Unit, Left, Right, Sink };
  int from;
  int to;
  Capacity capacity;
  int node;  // tree node the capacity refers to
  int cls;   // sink class for the complete variant, -1 means "the datapoint's label"
};

/// Vertices: source 0, tree nodes 1..2^{d+1}-1, then the sink (or one sink per class).
struct FlowGraph {
  int depth = 0;
  GraphVariant variant = GraphVariant::Balanced;
  int n_classes = 2;
  std::vector<Arc> arcs;

  int source() const { return 0; }
  int sink(int k = 0) const { return tree_index::num_nodes(depth) + 1 + k; }
  int num_vertices() const;
  bool is_sink(int v) const { return v > tree_index::num_nodes(depth); }
  std::string vertex_name(int v) const;
  /// Index of arc (from, to); -1 if absent.
  int find_arc(int from, int to) const;
};

FlowGraph build_graph(int depth, GraphVariant variant, int n_classes = 2);

/// Capacity of `arc` for datapoint (x, y) as an affine expression over the symbols.
AffineExpr arc_capacity(const FlowGraph& graph, const Arc& arc, std::span<const std::uint8_t> x, int y,
                        const SymbolTable& symbols);

/// Concrete branching/prediction values of a (possibly partial) tree.
struct TreeAssignment {
  int depth = 0;
  int n_features = 0;
  int n_classes = 0;
  std::vector<std::vector<double>> b;  // [node][feature], node 1..2^d-1
  std::vector<std::vector<double>> w;  // [node][class], node 1..2^{d+1}-1
  std::vector<double> p;               // [node]; empty for balanced trees

  static TreeAssignment zeros(int depth, int n_features, int n_classes, bool with_p);
};

struct CapacityAssignment {
  int datapoint = -1;
  std::vector<double> capacity;  // per graph arc
};

CapacityAssignment instantiate_capacities(const FlowGraph& graph, std::span<const std::uint8_t> x, int y,
                                          const TreeAssignment& tree, int datapoint = -1);

}  // namespace strongtree
