#include "strongtree/formulations.hpp"

#include <cmath>
#include <string>

#include "strongtree/constraints.hpp"
#include "strongtree/error.hpp"
#include "strongtree/simplex.hpp"

namespace strongtree {

namespace ti = tree_index;

const char* to_string(FormulationKind kind) {
  switch (kind) {
    case FormulationKind::FlowBalanced: return "flow";
    case FormulationKind::FlowRegularized: return "flow-reg";
    case FormulationKind::CompleteFlow: return "complete";
    case FormulationKind::OctBaseline: return "oct";
    case FormulationKind::BendersBalanced: return "benders";
    case FormulationKind::BendersRegularized: return "benders-reg";
  }
  return "?";
}

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Accuracy: return "accuracy";
    case ObjectiveKind::BalancedAccuracy: return "balanced-accuracy";
    case ObjectiveKind::WorstCaseAccuracy: return "worst-case-accuracy";
    case ObjectiveKind::Sensitivity: return "sensitivity";
  }
  return "?";
}

ObjectiveKind parse_objective(const std::string& text) {
  for (ObjectiveKind k : {ObjectiveKind::Accuracy, ObjectiveKind::BalancedAccuracy,
                          ObjectiveKind::WorstCaseAccuracy, ObjectiveKind::Sensitivity}) {
    if (text == to_string(k)) return k;
  }
  if (text == "balanced_accuracy" || text == "balanced") return ObjectiveKind::BalancedAccuracy;
  if (text == "worst_case_accuracy" || text == "worst-case") return ObjectiveKind::WorstCaseAccuracy;
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + text + "'");
}

bool VariableLayout::has_p() const { return !p.empty(); }

bool VariableLayout::is_flow() const {
  return kind == FormulationKind::FlowBalanced || kind == FormulationKind::FlowRegularized ||
         kind == FormulationKind::CompleteFlow;
}

double objective_lattice(double lambda) {
  if (lambda == 0.0) return 1.0;
  for (int q = 1; q <= 1000; ++q) {
    const double scaled = lambda * q;
    if (std::abs(scaled - std::round(scaled)) < 1e-9) return 1.0 / q;
  }
  return 0.0;
}

namespace {

void check_common(const BinaryDataset& data, int depth) {
  if (depth < 1) throw Error(ErrorCode::DepthTooSmall, "tree depth must be at least 1");
  if (data.n_classes() < 2) throw Error(ErrorCode::TooFewClasses, "at least 2 classes are required");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
  }
}

std::string node_tag(int n) { return "[" + std::to_string(n) + "]"; }

/// Adds b (branching nodes), w (on `w_first`..last node) and optionally p, in that order.
void add_tree_columns(Formulation& form, int w_first, bool with_p, bool p_on_terminals) {
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  const int nodes = ti::num_nodes(L.depth);
  L.symbols.depth = L.depth;
  L.symbols.n_features = L.n_features;
  L.symbols.n_classes = L.n_classes;
  L.symbols.b.assign(ti::first_leaf(L.depth), std::vector<int>(L.n_features, -1));
  L.symbols.w.assign(nodes + 1, std::vector<int>(L.n_classes, -1));
  for (int n = 1; n < ti::first_leaf(L.depth); ++n) {
    for (int f = 0; f < L.n_features; ++f) {
      L.symbols.b[n][f] = m.add_binary("b[" + std::to_string(n) + "," + std::to_string(f) + "]");
    }
  }
  for (int n = w_first; n <= nodes; ++n) {
    for (int k = 0; k < L.n_classes; ++k) {
      L.symbols.w[n][k] = m.add_binary("w[" + std::to_string(n) + "," + std::to_string(k) + "]");
    }
  }
  if (with_p) {
    L.p.assign(nodes + 1, -1);
    const int last = p_on_terminals ? nodes : ti::first_leaf(L.depth) - 1;
    for (int n = 1; n <= last; ++n) L.p[n] = m.add_binary("p" + node_tag(n));
  }
}

std::vector<Term> sum_b(const VariableLayout& L, int n, double coef = 1.0) {
  std::vector<Term> t;
  for (int f = 0; f < L.n_features; ++f) t.push_back({L.symbols.b[n][f], coef});
  return t;
}

std::vector<Term> sum_w(const VariableLayout& L, int n, double coef = 1.0) {
  std::vector<Term> t;
  for (int k = 0; k < L.n_classes; ++k) t.push_back({L.symbols.w[n][k], coef});
  return t;
}

/// Branch-or-leaf structure shared by the imbalanced formulations.
void add_leaf_structure(Formulation& form) {
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  for (int n = 1; n <= ti::num_nodes(L.depth); ++n) {
    std::vector<Term> t;
    if (ti::is_branching(n, L.depth)) t = sum_b(L, n);
    t.push_back({L.p[n], 1.0});
    for (int a : ti::ancestors(n)) t.push_back({L.p[a], 1.0});
    m.add_constraint(std::move(t), Relation::Equal, 1.0, "leaf_or_branch" + node_tag(n));
  }
  for (int n = 1; n <= ti::num_nodes(L.depth); ++n) {
    std::vector<Term> t = sum_w(L, n);
    t.push_back({L.p[n], -1.0});
    m.add_constraint(std::move(t), Relation::Equal, 0.0, "predict_at_leaf" + node_tag(n));
  }
}

/// z columns, conservation and capacity rows for every datapoint on the layout's graph.
void add_flow_block(Formulation& form) {
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  const FlowGraph& g = L.graph;
  const int n_arcs = static_cast<int>(g.arcs.size());
  L.z.assign(L.n_rows, std::vector<int>(n_arcs, -1));
  for (int i = 0; i < L.n_rows; ++i) {
    for (int a = 0; a < n_arcs; ++a) {
      const Arc& arc = g.arcs[a];
      L.z[i][a] = m.add_binary("z[" + std::to_string(i) + "," + g.vertex_name(arc.from) + "_" +
                               g.vertex_name(arc.to) + "]");
    }
  }
  const int nodes = ti::num_nodes(L.depth);
  for (int i = 0; i < L.n_rows; ++i) {
    const std::string tag = "[" + std::to_string(i) + "]";
    std::vector<std::vector<Term>> balance(nodes + 1);
    for (int a = 0; a < n_arcs; ++a) {
      const Arc& arc = g.arcs[a];
      if (arc.to >= 1 && arc.to <= nodes) balance[arc.to].push_back({L.z[i][a], 1.0});
      if (arc.from >= 1) balance[arc.from].push_back({L.z[i][a], -1.0});
    }
    for (int n = 1; n <= nodes; ++n) {
      m.add_constraint(std::move(balance[n]), Relation::Equal, 0.0, "conserve" + tag + node_tag(n));
    }
    for (int a = 0; a < n_arcs; ++a) {
      const Arc& arc = g.arcs[a];
      if (arc.capacity == Arc::Capacity::Unit) {
        if (g.variant == GraphVariant::Complete) {
          m.add_constraint({{L.z[i][a], 1.0}}, Relation::Equal, 1.0, "route_all" + tag);
        } else {
          m.add_constraint({{L.z[i][a], 1.0}}, Relation::LessEqual, 1.0, "source" + tag);
        }
        continue;
      }
      const AffineExpr cap = arc_capacity(g, arc, form.data.x[i], form.data.y[i], L.symbols);
      std::vector<Term> t{{L.z[i][a], 1.0}};
      for (const Term& c : cap.terms) t.push_back({c.var, -c.coef});
      m.add_constraint(std::move(t), Relation::LessEqual, cap.constant,
                       "capacity" + tag + "[" + g.vertex_name(arc.from) + "_" + g.vertex_name(arc.to) + "]");
    }
  }
}

Formulation start(const BinaryDataset& data, int depth, FormulationKind kind) {
  check_common(data, depth);
  Formulation form;
  form.data = data;
  form.layout.kind = kind;
  form.layout.depth = depth;
  form.layout.n_features = data.n_features();
  form.layout.n_classes = data.n_classes();
  form.layout.n_rows = data.n_rows();
  return form;
}

/// (1 - lambda) * correct - lambda * splits.
void set_regularized_objective(Formulation& form, double lambda) {
  LinearModel& m = form.model;
  const VariableLayout& L = form.layout;
  m.clear_objective();
  for (int i = 0; i < L.n_rows; ++i) {
    for (const Term& t : correct_flow_terms(L, form.data, i)) {
      m.set_objective_coefficient(t.var, m.variable(t.var).objective + (1.0 - lambda) * t.coef);
    }
  }
  if (lambda != 0.0) {
    for (int n = 1; n < ti::first_leaf(L.depth); ++n) {
      for (int f = 0; f < L.n_features; ++f) m.set_objective_coefficient(L.symbols.b[n][f], -lambda);
    }
  }
  m.objective_granularity = objective_lattice(lambda);
}

}  // namespace

std::vector<Term> correct_flow_terms(const VariableLayout& L, const BinaryDataset& data, int i) {
  std::vector<Term> out;
  if (L.kind == FormulationKind::BendersBalanced || L.kind == FormulationKind::BendersRegularized) {
    out.push_back({L.g[i], 1.0});
    return out;
  }
  if (!L.is_flow()) throw Error(ErrorCode::IncompatibleFormulation, "formulation has no flow variables");
  const FlowGraph& g = L.graph;
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const Arc& arc = g.arcs[a];
    if (arc.capacity != Arc::Capacity::Sink) continue;
    if (arc.cls >= 0 && arc.cls != data.y[i]) continue;
    out.push_back({L.z[i][a], 1.0});
  }
  return out;
}

std::vector<Term> predicted_flow_terms(const VariableLayout& L, int i, int k) {
  if (L.kind != FormulationKind::CompleteFlow) {
    throw Error(ErrorCode::IncompatibleFormulation, "per-class flows need the complete flow formulation");
  }
  std::vector<Term> out;
  const FlowGraph& g = L.graph;
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    if (g.arcs[a].capacity == Arc::Capacity::Sink && g.arcs[a].cls == k) out.push_back({L.z[i][a], 1.0});
  }
  return out;
}

Formulation build_flow_balanced(const BinaryDataset& data, int depth) {
  Formulation form = start(data, depth, FormulationKind::FlowBalanced);
  VariableLayout& L = form.layout;
  add_tree_columns(form, ti::first_leaf(depth), false, false);
  L.graph = build_graph(depth, GraphVariant::Balanced, L.n_classes);
  add_flow_block(form);
  for (int n = 1; n < ti::first_leaf(depth); ++n) {
    form.model.add_constraint(sum_b(L, n), Relation::Equal, 1.0, "one_feature" + node_tag(n));
  }
  for (int n = ti::first_leaf(depth); n <= ti::num_nodes(depth); ++n) {
    form.model.add_constraint(sum_w(L, n), Relation::Equal, 1.0, "one_class" + node_tag(n));
  }
  set_regularized_objective(form, 0.0);
  return form;
}

Formulation build_flow_regularized(const BinaryDataset& data, int depth, double lambda) {
  check_lambda(lambda);
  Formulation form = start(data, depth, FormulationKind::FlowRegularized);
  form.lambda = lambda;
  add_tree_columns(form, 1, true, true);
  form.layout.graph = build_graph(depth, GraphVariant::Imbalanced, form.layout.n_classes);
  add_flow_block(form);
  add_leaf_structure(form);
  set_regularized_objective(form, lambda);
  return form;
}

Formulation build_complete_flow(const BinaryDataset& data, int depth, ObjectiveKind objective,
                                double lambda) {
  check_lambda(lambda);
  Formulation form = start(data, depth, FormulationKind::CompleteFlow);
  form.lambda = lambda;
  add_tree_columns(form, 1, true, true);
  form.layout.graph = build_graph(depth, GraphVariant::Complete, form.layout.n_classes);
  add_flow_block(form);
  add_leaf_structure(form);
  set_regularized_objective(form, lambda);
  if (objective != ObjectiveKind::Accuracy) set_objective(form, objective);
  return form;
}

Formulation build_benders_master(const BinaryDataset& data, int depth, double lambda, bool regularized) {
  check_lambda(lambda);
  if (!regularized && lambda != 0.0) {
    throw Error(ErrorCode::IncompatibleFormulation, "the balanced master has no regularization term");
  }
  Formulation form = start(data, depth, regularized ? FormulationKind::BendersRegularized
                                                    : FormulationKind::BendersBalanced);
  form.lambda = lambda;
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  if (regularized) {
    add_tree_columns(form, 1, true, true);
    L.graph = build_graph(depth, GraphVariant::Imbalanced, L.n_classes);
  } else {
    add_tree_columns(form, ti::first_leaf(depth), false, false);
    L.graph = build_graph(depth, GraphVariant::Balanced, L.n_classes);
  }
  L.g.assign(L.n_rows, -1);
  for (int i = 0; i < L.n_rows; ++i) L.g[i] = m.add_variable("g[" + std::to_string(i) + "]", 0.0, 1.0, false);
  if (regularized) {
    add_leaf_structure(form);
  } else {
    for (int n = 1; n < ti::first_leaf(depth); ++n) {
      m.add_constraint(sum_b(L, n), Relation::Equal, 1.0, "one_feature" + node_tag(n));
    }
    for (int n = ti::first_leaf(depth); n <= ti::num_nodes(depth); ++n) {
      m.add_constraint(sum_w(L, n), Relation::Equal, 1.0, "one_class" + node_tag(n));
    }
  }
  set_regularized_objective(form, lambda);
  return form;
}

Formulation build_oct_baseline(const BinaryDataset& data, int depth, double lambda, bool balanced) {
  check_lambda(lambda);
  Formulation form = start(data, depth, FormulationKind::OctBaseline);
  form.lambda = lambda;
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  const int first = ti::first_leaf(depth);
  const int n_leaves = first;
  const int N = L.n_rows;
  const double big_m = N;

  add_tree_columns(form, first, true, false);
  if (balanced) {
    for (int n = 1; n < first; ++n) m.set_bounds(L.p[n], 1.0, 1.0);
  }
  L.v.assign(first, -1);
  for (int n = 1; n < first; ++n) L.v[n] = m.add_variable("v" + node_tag(n), 0.0, 1.0, false);
  L.zeta.assign(N, std::vector<int>(n_leaves, -1));
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < n_leaves; ++t) {
      L.zeta[i][t] = m.add_binary("zeta[" + std::to_string(i) + "," + std::to_string(first + t) + "]");
    }
  }
  L.L.assign(n_leaves, -1);
  L.Q.assign(n_leaves, -1);
  L.l.assign(n_leaves, -1);
  L.Qk.assign(n_leaves, std::vector<int>(L.n_classes, -1));
  for (int t = 0; t < n_leaves; ++t) {
    const std::string tag = node_tag(first + t);
    // L_n >= 0 keeps the misclassification count from going negative when the leaf is empty.
    L.L[t] = m.add_variable("L" + tag, 0.0, kInfinity, false);
    L.Q[t] = m.add_variable("Q" + tag, 0.0, kInfinity, false);
    for (int k = 0; k < L.n_classes; ++k) {
      L.Qk[t][k] = m.add_variable("Q" + tag + "[" + std::to_string(k) + "]", 0.0, kInfinity, false);
    }
    L.l[t] = m.add_binary("l" + tag);
  }

  for (int t = 0; t < n_leaves; ++t) {
    const int n = first + t;
    const std::string tag = node_tag(n);
    for (int k = 0; k < L.n_classes; ++k) {
      const std::string kt = tag + "[" + std::to_string(k) + "]";
      // L_n >= Q_n - Q_nk - M (1 - w_nk) and L_n <= Q_n - Q_nk + M w_nk
      m.add_constraint({{L.L[t], 1.0}, {L.Q[t], -1.0}, {L.Qk[t][k], 1.0}, {L.symbols.w[n][k], -big_m}},
                       Relation::GreaterEqual, -big_m, "miss_lo" + kt);
      m.add_constraint({{L.L[t], 1.0}, {L.Q[t], -1.0}, {L.Qk[t][k], 1.0}, {L.symbols.w[n][k], -big_m}},
                       Relation::LessEqual, 0.0, "miss_hi" + kt);
      std::vector<Term> count{{L.Qk[t][k], 1.0}};
      for (int i = 0; i < N; ++i) {
        if (data.y[i] == k) count.push_back({L.zeta[i][t], -1.0});
      }
      m.add_constraint(std::move(count), Relation::Equal, 0.0, "class_count" + kt);
    }
    std::vector<Term> total{{L.Q[t], 1.0}};
    for (int i = 0; i < N; ++i) total.push_back({L.zeta[i][t], -1.0});
    m.add_constraint(std::move(total), Relation::Equal, 0.0, "count" + tag);
    std::vector<Term> labelled = sum_w(L, n);
    labelled.push_back({L.l[t], -1.0});
    m.add_constraint(std::move(labelled), Relation::Equal, 0.0, "labelled" + tag);
    for (int i = 0; i < N; ++i) {
      m.add_constraint({{L.zeta[i][t], 1.0}, {L.l[t], -1.0}}, Relation::LessEqual, 0.0,
                       "nonempty[" + std::to_string(i) + "]" + tag);
    }
  }
  for (int i = 0; i < N; ++i) {
    std::vector<Term> one;
    for (int t = 0; t < n_leaves; ++t) one.push_back({L.zeta[i][t], 1.0});
    m.add_constraint(std::move(one), Relation::Equal, 1.0, "assign[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < n_leaves; ++t) {
      const int n = first + t;
      const auto [went_left, went_right] = ti::left_right_ancestor_sets(n);
      const std::string tag = "[" + std::to_string(i) + "]" + node_tag(n);
      for (int a : went_right) {
        std::vector<Term> r;
        for (int f = 0; f < L.n_features; ++f) {
          if (data.x[i][f]) r.push_back({L.symbols.b[a][f], 1.0});
        }
        r.push_back({L.v[a], -1.0});
        r.push_back({L.zeta[i][t], -1.0});
        m.add_constraint(std::move(r), Relation::GreaterEqual, -1.0, "go_right" + tag + node_tag(a));
      }
      for (int a : went_left) {
        std::vector<Term> r;
        for (int f = 0; f < L.n_features; ++f) {
          if (data.x[i][f]) r.push_back({L.symbols.b[a][f], 1.0});
        }
        r.push_back({L.v[a], -1.0});
        r.push_back({L.zeta[i][t], 2.0});
        m.add_constraint(std::move(r), Relation::LessEqual, 1.0, "go_left" + tag + node_tag(a));
      }
    }
  }
  for (int n = 1; n < first; ++n) {
    const std::string tag = node_tag(n);
    std::vector<Term> split = sum_b(L, n);
    split.push_back({L.p[n], -1.0});
    m.add_constraint(std::move(split), Relation::Equal, 0.0, "split" + tag);
    m.add_constraint({{L.v[n], 1.0}, {L.p[n], -1.0}}, Relation::LessEqual, 0.0, "v_le_p" + tag);
    // binary data: v can be fixed to p
    m.add_constraint({{L.v[n], 1.0}, {L.p[n], -1.0}}, Relation::Equal, 0.0, "v_eq_p" + tag);
    if (n > 1) {
      m.add_constraint({{L.p[n], 1.0}, {L.p[ti::parent(n)], -1.0}}, Relation::LessEqual, 0.0,
                       "hierarchy" + tag);
    }
  }

  for (int t = 0; t < n_leaves; ++t) m.set_objective_coefficient(L.L[t], -(1.0 - lambda));
  if (lambda != 0.0) {
    for (int n = 1; n < first; ++n) m.set_objective_coefficient(L.p[n], -lambda);
  }
  m.objective_offset = (1.0 - lambda) * N;
  m.objective_granularity = objective_lattice(lambda);
  return form;
}

namespace {

/// Leaf label of an OCT terminal; empty terminals carry no label and default to 0.
int oct_label(const VariableLayout& L, std::span<const double> v, int n) {
  for (int k = 0; k < L.n_classes; ++k) {
    if (v[L.symbols.w[n][k]] > 0.5) return k;
  }
  return 0;
}

int chosen_feature(const VariableLayout& L, std::span<const double> v, int n) {
  for (int f = 0; f < L.n_features; ++f) {
    if (v[L.symbols.b[n][f]] > 0.5) return f;
  }
  return -1;
}

bool is_leaf(const VariableLayout& L, std::span<const double> v, int n) {
  if (ti::is_terminal(n, L.depth)) return true;
  if (L.has_p() && L.p[n] >= 0 && L.kind != FormulationKind::OctBaseline) return v[L.p[n]] > 0.5;
  if (L.kind == FormulationKind::OctBaseline) return v[L.p[n]] < 0.5;
  return false;
}

}  // namespace

TrainedTree decode_tree(const VariableLayout& L, std::span<const double> v, const BinaryDataset& data) {
  TrainedTree tree = TrainedTree::empty(L.depth, data.feature_names, data.class_names);
  tree.encoding = data.encoding;
  std::vector<int> stack{1};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (is_leaf(L, v, n)) {
      tree.leaf[n] = 1;
      if (L.kind == FormulationKind::OctBaseline) {
        // a node that does not split sends every point right, down to the right-most terminal
        int t = n;
        while (!ti::is_terminal(t, L.depth)) t = ti::right(t);
        tree.label[n] = oct_label(L, v, t);
      } else {
        tree.label[n] = 0;
        for (int k = 0; k < L.n_classes; ++k) {
          if (L.symbols.w[n][k] >= 0 && v[L.symbols.w[n][k]] > 0.5) tree.label[n] = k;
        }
      }
      continue;
    }
    tree.feature[n] = std::max(0, chosen_feature(L, v, n));
    stack.push_back(ti::right(n));
    stack.push_back(ti::left(n));
  }
  return tree;
}

TrainedTree extract_tree(const Formulation& form, std::span<const double> values) {
  const LinearModel& m = form.model;
  if (static_cast<int>(values.size()) != m.num_variables()) {
    throw Error(ErrorCode::DimensionMismatch, "assignment length does not match the model");
  }
  for (int j = 0; j < m.num_variables(); ++j) {
    if (m.variable(j).is_integer && std::abs(values[j] - std::round(values[j])) > 1e-6) {
      throw Error(ErrorCode::NonIntegralAssignment,
                  "variable " + m.variable(j).name + " = " + std::to_string(values[j]) + " is not integral");
    }
  }
  const double violation = m.max_violation(values);
  if (violation > 1e-6) {
    throw Error(ErrorCode::InfeasibleAssignment,
                "assignment violates the model by " + std::to_string(violation));
  }
  const VariableLayout& L = form.layout;
  // every reachable branching node must pick exactly one feature, every leaf one class
  TrainedTree tree = decode_tree(L, values, form.data);
  for (int n : tree.reachable_nodes()) {
    if (tree.leaf[n]) continue;
    int chosen = 0;
    for (int f = 0; f < L.n_features; ++f) chosen += values[L.symbols.b[n][f]] > 0.5;
    if (chosen != 1) {
      throw Error(ErrorCode::InfeasibleAssignment,
                  "node " + std::to_string(n) + " branches on " + std::to_string(chosen) + " features");
    }
  }
  tree.objective = m.objective_value(values);
  tree.validate();
  return tree;
}

double lp_bound(const LinearModel& model) {
  const LpSolution s = solve_lp(model, true);
  if (s.status == LpStatus::Infeasible) return -kInfinity;
  if (s.status == LpStatus::Unbounded) return kInfinity;
  return s.objective;
}

}  // namespace strongtree
