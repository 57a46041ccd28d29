#include "strongtree/benders.hpp"

#include <algorithm>
#include <map>

#include "strongtree/error.hpp"

namespace strongtree {

namespace ti = tree_index;

bool SourceSet::contains(int v) const { return std::find(vertices.begin(), vertices.end(), v) != vertices.end(); }

std::string SourceSet::describe() const {
  std::string out = "{";
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (k) out += ",";
    out += vertices[k] == 0 ? "s" : std::to_string(vertices[k]);
  }
  return out + "}";
}

void SeparationStats::record(int visits) {
  ++calls;
  total_visits += visits;
  max_visits = std::max(max_visits, visits);
}

void SeparationStats::merge(const SeparationStats& other) {
  calls += other.calls;
  total_visits += other.total_visits;
  max_visits = std::max(max_visits, other.max_visits);
}

namespace {

constexpr double kCutTolerance = 1e-6;

double branch_capacity(const TreeAssignment& tree, int n, std::span<const std::uint8_t> x, std::uint8_t side) {
  double c = 0.0;
  for (int f = 0; f < tree.n_features; ++f) {
    if (x[f] == side) c += tree.b[n][f];
  }
  return c;
}

void check_point(const TreeAssignment& tree, std::span<const std::uint8_t> x, int y) {
  if (static_cast<int>(x.size()) != tree.n_features || y < 0 || y >= tree.n_classes) {
    throw Error(ErrorCode::DimensionMismatch, "datapoint does not match the tree assignment");
  }
}

/// Shared walk; `stop_here(n)` ends the descent at n (n is then the leaf of the path).
template <class StopAt>
std::optional<SourceSet> walk(const TreeAssignment& tree, double g, std::span<const std::uint8_t> x, int y,
                              int datapoint, SeparationStats* stats, StopAt stop_here) {
  check_point(tree, x, y);
  if (g <= kCutTolerance) {
    if (stats) stats->record(0);
    return std::nullopt;
  }
  SourceSet S;
  S.datapoint = datapoint;
  S.vertices.push_back(0);
  int n = 1;
  bool dead_end = false;
  while (!stop_here(n)) {
    S.vertices.push_back(n);
    if (branch_capacity(tree, n, x, 0) > 0.5) {
      n = ti::left(n);
    } else if (branch_capacity(tree, n, x, 1) > 0.5) {
      n = ti::right(n);
    } else {
      // no feature chosen: the datapoint cannot leave n, every arc out of S is empty
      dead_end = true;
      break;
    }
  }
  if (!dead_end) S.vertices.push_back(n);
  if (stats) stats->record(static_cast<int>(S.vertices.size()));
  const double sink = dead_end ? 0.0 : tree.w[n][y];
  if (g > sink + kCutTolerance) return S;
  return std::nullopt;
}

}  // namespace

std::optional<SourceSet> separate_balanced(const TreeAssignment& tree, double g, std::span<const std::uint8_t> x,
                                           int y, int datapoint, SeparationStats* stats) {
  const int depth = tree.depth;
  return walk(tree, g, x, y, datapoint, stats, [depth](int n) { return !ti::is_branching(n, depth); });
}

std::optional<SourceSet> separate_regularized(const TreeAssignment& tree, double g,
                                              std::span<const std::uint8_t> x, int y, int datapoint,
                                              SeparationStats* stats) {
  if (tree.p.empty()) throw Error(ErrorCode::InvalidArgument, "regularized separation needs leaf flags p");
  const int depth = tree.depth;
  return walk(tree, g, x, y, datapoint, stats,
              [&tree, depth](int n) { return tree.p[n] > 0.5 || !ti::is_branching(n, depth); });
}

Constraint BendersCut::as_constraint(int g_column) const {
  Constraint c;
  c.terms.push_back({g_column, 1.0});
  for (const Term& t : rhs.terms) c.terms.push_back({t.var, -t.coef});
  c.relation = Relation::LessEqual;
  c.rhs = rhs.constant;
  c.name = "cut[" + std::to_string(datapoint) + "]";
  return c;
}

namespace {

AffineExpr merged(const AffineExpr& e) {
  std::map<int, double> coef;
  for (const Term& t : e.terms) coef[t.var] += t.coef;
  AffineExpr out;
  out.constant = e.constant;
  for (const auto& [var, c] : coef) {
    if (c != 0.0) out.terms.push_back({var, c});
  }
  return out;
}

}  // namespace

BendersCut expand_cut(const SourceSet& S, const FlowGraph& graph, std::span<const std::uint8_t> x, int y,
                      const SymbolTable& symbols) {
  BendersCut cut;
  cut.datapoint = S.datapoint;
  cut.source = S;
  AffineExpr sum;
  for (const Arc& arc : graph.arcs) {
    if (!S.contains(arc.from) || S.contains(arc.to)) continue;
    const AffineExpr cap = arc_capacity(graph, arc, x, y, symbols);
    sum.constant += cap.constant;
    sum.terms.insert(sum.terms.end(), cap.terms.begin(), cap.terms.end());
  }
  cut.rhs = merged(sum);
  return cut;
}

AffineExpr facet_form(const SourceSet& S, const TreeAssignment& tree, std::span<const std::uint8_t> x, int y,
                      const SymbolTable& symbols) {
  AffineExpr e;
  const int leaf = S.vertices.back();
  for (std::size_t k = 1; k + 1 < S.vertices.size(); ++k) {
    const int n = S.vertices[k];
    int chosen = -1;
    for (int f = 0; f < tree.n_features; ++f) {
      if (tree.b[n][f] > 0.5) chosen = f;
    }
    if (chosen < 0) throw Error(ErrorCode::InvalidArgument, "path node without a branching feature");
    for (int f = 0; f < tree.n_features; ++f) {
      if (x[f] != x[chosen]) e.terms.push_back({symbols.b_at(n, f), 1.0});
    }
  }
  e.terms.push_back({symbols.w_at(leaf, y), 1.0});
  return merged(e);
}

double cut_capacity(const SourceSet& S, const FlowGraph& graph, const CapacityAssignment& capacities) {
  double c = 0.0;
  for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
    if (S.contains(graph.arcs[a].from) && !S.contains(graph.arcs[a].to)) c += capacities.capacity[a];
  }
  return c;
}

TreeAssignment tree_assignment(const VariableLayout& layout, std::span<const double> values) {
  TreeAssignment t = TreeAssignment::zeros(layout.depth, layout.n_features, layout.n_classes, layout.has_p());
  const SymbolTable& s = layout.symbols;
  for (int n = 1; n < ti::first_leaf(layout.depth); ++n) {
    for (int f = 0; f < layout.n_features; ++f) t.b[n][f] = values[s.b[n][f]];
  }
  for (int n = 1; n <= ti::num_nodes(layout.depth); ++n) {
    for (int k = 0; k < layout.n_classes; ++k) {
      if (s.w[n][k] >= 0) t.w[n][k] = values[s.w[n][k]];
    }
    if (layout.has_p() && layout.p[n] >= 0) t.p[n] = values[layout.p[n]];
  }
  return t;
}

namespace {

int leaf_of(const TreeAssignment& tree, std::span<const std::uint8_t> x) {
  int n = 1;
  while (ti::is_branching(n, tree.depth)) {
    n = branch_capacity(tree, n, x, 0) > 0.5 ? ti::left(n) : ti::right(n);
  }
  return n;
}

int feature_at(const TreeAssignment& tree, int n) {
  for (int f = 0; f < tree.n_features; ++f) {
    if (tree.b[n][f] > 0.5) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "base tree has a node without a branching feature");
}

}  // namespace

std::vector<MasterPoint> facet_witnesses(const BinaryDataset& data, const TreeAssignment& base, int i) {
  if (!base.p.empty()) throw Error(ErrorCode::InvalidArgument, "witnesses are defined for balanced trees");
  if (i < 0 || i >= data.n_rows()) throw Error(ErrorCode::InvalidArgument, "datapoint index out of range");
  const int depth = base.depth;
  const int F = base.n_features;
  const int K = base.n_classes;
  const int N = data.n_rows();
  const std::vector<std::uint8_t>& xi = data.x[i];
  const int yi = data.y[i];
  const std::optional<SourceSet> S = separate_balanced(base, 1.0, xi, yi, i);
  if (!S) throw Error(ErrorCode::InvalidArgument, "the base tree classifies datapoint " + std::to_string(i) + " correctly");
  std::vector<int> path(S->vertices.begin() + 1, S->vertices.end() - 1);
  const int li = S->vertices.back();
  auto on_path = [&](int n) { return std::find(path.begin(), path.end(), n) != path.end(); };
  std::vector<int> fn(ti::first_leaf(depth), -1);
  for (int n = 1; n < ti::first_leaf(depth); ++n) fn[n] = feature_at(base, n);

  MasterPoint baseline;
  baseline.family = 1;
  baseline.tree = TreeAssignment::zeros(depth, F, K, false);
  for (int n : path) baseline.tree.b[n][fn[n]] = 1.0;
  baseline.g.assign(N, 0.0);

  std::vector<MasterPoint> out{baseline};
  auto variant = [&](int family) {
    MasterPoint p = baseline;
    p.family = family;
    return p;
  };
  const int first = ti::first_leaf(depth);
  const int last = ti::num_nodes(depth);
  for (int n = first; n <= last; ++n) {
    for (int k = 0; k < K; ++k) {
      if (k == yi) continue;
      MasterPoint p = variant(2);
      p.tree.w[n][k] = 1.0;
      out.push_back(std::move(p));
    }
  }
  for (int n = first; n <= last; ++n) {
    if (n == li) continue;
    MasterPoint p = variant(3);
    p.tree.w[n][yi] = 1.0;
    out.push_back(std::move(p));
  }
  {
    MasterPoint p = variant(4);
    p.tree.w[li][yi] = 1.0;
    p.g[i] = 1.0;
    out.push_back(std::move(p));
  }
  for (int n = 1; n < first; ++n) {
    if (on_path(n)) continue;
    for (int f = 0; f < F; ++f) {
      MasterPoint p = variant(5);
      p.tree.b[n][f] = 1.0;
      out.push_back(std::move(p));
    }
  }
  for (int n : path) {
    MasterPoint p = variant(6);
    p.tree.b[n][fn[n]] = 0.0;
    out.push_back(std::move(p));
  }
  for (int n : path) {
    for (int f = 0; f < F; ++f) {
      if (f == fn[n]) continue;
      if (xi[f] == xi[fn[n]]) {
        MasterPoint p = variant(7);
        p.tree.b[n][fn[n]] = 0.0;
        p.tree.b[n][f] = 1.0;
        out.push_back(std::move(p));
        continue;
      }
      MasterPoint p = variant(8);
      p.tree.b[n][fn[n]] = 0.0;
      p.tree.b[n][f] = 1.0;
      for (int m = first; m <= last; ++m) {
        if (m != li) p.tree.w[m][yi] = 1.0;
      }
      p.g[i] = 1.0;
      // i now leaves the path at n; give the branching nodes on its new route a
      // feature so that it reaches one of the leaves labelled y^i
      int m = xi[f] == 0 ? ti::left(n) : ti::right(n);
      while (ti::is_branching(m, depth)) {
        p.tree.b[m][0] = 1.0;
        m = xi[0] == 0 ? ti::left(m) : ti::right(m);
      }
      out.push_back(std::move(p));
    }
  }
  for (int j = 0; j < N; ++j) {
    if (j == i) continue;
    MasterPoint p;
    p.tree = base;
    for (auto& row : p.tree.w) std::fill(row.begin(), row.end(), 0.0);
    p.g.assign(N, 0.0);
    const int lj = leaf_of(base, data.x[j]);
    p.tree.w[lj][data.y[j]] = 1.0;
    p.g[j] = 1.0;
    if (data.y[j] != yi) {
      p.family = 9;
    } else if (lj != li) {
      p.family = 10;
    } else {
      p.family = 11;
      p.g[i] = 1.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> flatten(const MasterPoint& point) {
  const TreeAssignment& t = point.tree;
  std::vector<double> out;
  for (int n = 1; n < ti::first_leaf(t.depth); ++n) out.insert(out.end(), t.b[n].begin(), t.b[n].end());
  for (int n = ti::first_leaf(t.depth); n <= ti::num_nodes(t.depth); ++n) {
    out.insert(out.end(), t.w[n].begin(), t.w[n].end());
  }
  out.insert(out.end(), point.g.begin(), point.g.end());
  return out;
}

LazySeparator make_separator(const Formulation& master, SeparationStats& stats, std::vector<BendersCut>& cuts,
                             const std::function<void(const std::string&)>& cut_log) {
  const VariableLayout& L = master.layout;
  if (L.kind != FormulationKind::BendersBalanced && L.kind != FormulationKind::BendersRegularized) {
    throw Error(ErrorCode::IncompatibleFormulation, "separation needs a Benders master");
  }
  const bool regularized = L.kind == FormulationKind::BendersRegularized;
  return [&master, &stats, &cuts, cut_log, regularized](std::span<const double> values) {
    const VariableLayout& layout = master.layout;
    const TreeAssignment tree = tree_assignment(layout, values);
    std::vector<Constraint> rows;
    for (int i = 0; i < layout.n_rows; ++i) {
      const double g = values[layout.g[i]];
      const auto& x = master.data.x[i];
      const int y = master.data.y[i];
      std::optional<SourceSet> S = regularized ? separate_regularized(tree, g, x, y, i, &stats)
                                               : separate_balanced(tree, g, x, y, i, &stats);
      if (!S) continue;
      BendersCut cut = expand_cut(*S, layout.graph, x, y, layout.symbols);
      if (cut_log) {
        cut_log("i=" + std::to_string(i) + " S=" + S->describe() + " rhs_terms=" +
                std::to_string(cut.rhs.terms.size()));
      }
      rows.push_back(cut.as_constraint(layout.g[i]));
      cuts.push_back(std::move(cut));
    }
    return rows;
  };
}

BendersResult solve_benders(Formulation master, const BendersOptions& options) {
  BendersResult result;
  result.master = std::move(master);
  const LazySeparator separator =
      make_separator(result.master, result.separation, result.cuts, options.cut_log);
  result.mio = solve_mio(result.master.model, separator, options.solver);
  return result;
}

BendersResult solve_benders(const BinaryDataset& data, int depth, double lambda, bool regularized,
                            const BendersOptions& options) {
  return solve_benders(build_benders_master(data, depth, lambda, regularized), options);
}

}  // namespace strongtree
