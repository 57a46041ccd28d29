#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strongtree/branch_bound.hpp"
#include "strongtree/dataset.hpp"
#include "strongtree/flow_graph.hpp"
#include "strongtree/formulations.hpp"
#include "strongtree/tree.hpp"

namespace strongtree {

/// Source side of a cut: vertex ids of the flow graph (0 is the source), in visiting order.
struct SourceSet {
  int datapoint = -1;
  std::vector<int> vertices;

  bool contains(int v) const;
  std::string describe() const;  // "{s,1,3,6}"
};

/// Number of vertices each separation call put into S; the worst case is depth + 2.
struct SeparationStats {
  long calls = 0;
  int max_visits = 0;
  long long total_visits = 0;

  void record(int visits);
  void merge(const SeparationStats& other);
};

/// Walks the capacity-1 arcs of datapoint (x, y) from the root down to a leaf of a
/// balanced tree. Returns S when g exceeds the capacity of the leaf's sink arc.
std::optional<SourceSet> separate_balanced(const TreeAssignment& tree, double g, std::span<const std::uint8_t> x,
                                           int y, int datapoint = -1, SeparationStats* stats = nullptr);

/// Same walk for imbalanced trees, stopping at the first node with p = 1.
std::optional<SourceSet> separate_regularized(const TreeAssignment& tree, double g,
                                              std::span<const std::uint8_t> x, int y, int datapoint = -1,
                                              SeparationStats* stats = nullptr);

/// g^i <= sum of the capacities of the arcs leaving S.
struct BendersCut {
  int datapoint = -1;
  SourceSet source;
  AffineExpr rhs;

  /// Row g - rhs.terms <= rhs.constant over the master's columns.
  Constraint as_constraint(int g_column) const;
};

BendersCut expand_cut(const SourceSet& S, const FlowGraph& graph, std::span<const std::uint8_t> x, int y,
                      const SymbolTable& symbols);

/// w^{leaf}_{y} + sum over path nodes n of sum_{f: x_f != x_{f(n)}} b_{nf}, for S
/// produced by separate_balanced on `tree`.
AffineExpr facet_form(const SourceSet& S, const TreeAssignment& tree, std::span<const std::uint8_t> x, int y,
                      const SymbolTable& symbols);

/// Sum of concrete capacities of the arcs leaving S.
double cut_capacity(const SourceSet& S, const FlowGraph& graph, const CapacityAssignment& capacities);

/// Reads the b, w, p columns of a master or flow solution.
TreeAssignment tree_assignment(const VariableLayout& layout, std::span<const double> values);

/// A point of the balanced master space: (b, w) and one g per datapoint.
struct MasterPoint {
  int family = 0;
  TreeAssignment tree;
  std::vector<double> g;
};

/// Witness points on the face of the cut separated for datapoint `i` at the
/// integral balanced tree `base` (which must misclassify i). Families 1-11.
std::vector<MasterPoint> facet_witnesses(const BinaryDataset& data, const TreeAssignment& base, int i);

/// Flattens a point as (b over branching nodes, w over leaves, g).
std::vector<double> flatten(const MasterPoint& point);

struct BendersOptions {
  SolverConfig solver;
  /// Receives one line per emitted cut: "i=<idx> S=<nodes> rhs_terms=<count>".
  std::function<void(const std::string&)> cut_log;
};

struct BendersResult {
  Formulation master;
  MioResult mio;
  SeparationStats separation;
  std::vector<BendersCut> cuts;
};

/// Lazy separator over all datapoints for a master built by build_benders_master.
LazySeparator make_separator(const Formulation& master, SeparationStats& stats, std::vector<BendersCut>& cuts,
                             const std::function<void(const std::string&)>& cut_log = {});

/// Solves a master (possibly with side constraints attached) by branch-and-bound
/// with lazy separation at integral nodes.
BendersResult solve_benders(Formulation master, const BendersOptions& options = {});
BendersResult solve_benders(const BinaryDataset& data, int depth, double lambda, bool regularized,
                            const BendersOptions& options = {});

}  // namespace strongtree
