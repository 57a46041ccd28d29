#include "strongtree/constraints.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "strongtree/error.hpp"

namespace strongtree {

namespace ti = tree_index;

namespace {

void require_complete(const Formulation& form, const char* what) {
  if (form.layout.kind != FormulationKind::CompleteFlow) {
    throw Error(ErrorCode::IncompatibleFormulation, std::string(what) + " needs the complete flow formulation");
  }
}

void require_binary_labels(const Formulation& form, const char* what) {
  if (form.layout.n_classes != 2) {
    throw Error(ErrorCode::IncompatibleFormulation, std::string(what) + " needs exactly 2 classes");
  }
}

void check_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must lie in [0, 1]");
}

/// Terms counting rows with label `label` (or all rows when -1) predicted as class k.
std::vector<Term> predicted_count(const Formulation& form, int label, int k) {
  std::vector<Term> out;
  for (int i = 0; i < form.layout.n_rows; ++i) {
    if (label >= 0 && form.data.y[i] != label) continue;
    for (const Term& t : predicted_flow_terms(form.layout, i, k)) out.push_back(t);
  }
  return out;
}

std::vector<Term> scaled(std::vector<Term> terms, double c) {
  for (Term& t : terms) t.coef *= c;
  return terms;
}

std::vector<Term> concat(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void penalize_splits(Formulation& form) {
  if (form.lambda == 0.0) return;
  const VariableLayout& L = form.layout;
  for (int n = 1; n < ti::first_leaf(L.depth); ++n) {
    for (int f = 0; f < L.n_features; ++f) form.model.set_objective_coefficient(L.symbols.b[n][f], -form.lambda);
  }
}

}  // namespace

void attach_sparsity(Formulation& form, int max_splits) {
  if (max_splits < 0) throw Error(ErrorCode::InvalidArgument, "split budget must be nonnegative");
  if (!form.layout.has_p()) {
    throw Error(ErrorCode::IncompatibleFormulation, "a split budget needs a formulation with leaf flags");
  }
  const VariableLayout& L = form.layout;
  std::vector<Term> t;
  for (int n = 1; n < ti::first_leaf(L.depth); ++n) {
    for (int f = 0; f < L.n_features; ++f) t.push_back({L.symbols.b[n][f], 1.0});
  }
  form.model.add_constraint(std::move(t), Relation::LessEqual, max_splits, "split_budget");
}

void attach_feature_budget(Formulation& form, int max_features) {
  if (max_features < 0) throw Error(ErrorCode::InvalidArgument, "feature budget must be nonnegative");
  VariableLayout& L = form.layout;
  LinearModel& m = form.model;
  if (L.feature_used.empty()) {
    L.feature_used.assign(L.n_features, -1);
    for (int f = 0; f < L.n_features; ++f) {
      L.feature_used[f] = m.add_variable("bf[" + std::to_string(f) + "]", 0.0, 1.0, false);
      for (int n = 1; n < ti::first_leaf(L.depth); ++n) {
        m.add_constraint({{L.feature_used[f], 1.0}, {L.symbols.b[n][f], -1.0}}, Relation::GreaterEqual, 0.0,
                         "uses[" + std::to_string(n) + "," + std::to_string(f) + "]");
      }
    }
  }
  std::vector<Term> t;
  for (int f = 0; f < L.n_features; ++f) t.push_back({L.feature_used[f], 1.0});
  m.add_constraint(std::move(t), Relation::LessEqual, max_features, "feature_budget");
}

void attach_min_leaf(Formulation& form, int n_min) {
  if (n_min < 1) throw Error(ErrorCode::InvalidArgument, "minimum leaf support must be at least 1");
  const VariableLayout& L = form.layout;
  if (L.kind != FormulationKind::FlowRegularized && L.kind != FormulationKind::CompleteFlow) {
    throw Error(ErrorCode::IncompatibleFormulation, "minimum leaf support needs flow-reg or complete flow");
  }
  // the single-leaf tree is exempt: it always holds every datapoint
  for (int n = 2; n <= ti::num_nodes(L.depth); ++n) {
    const int arc = L.graph.find_arc(ti::parent(n), n);
    std::vector<Term> t;
    for (int i = 0; i < L.n_rows; ++i) t.push_back({L.z[i][arc], 1.0});
    t.push_back({L.p[n], -static_cast<double>(n_min)});
    form.model.add_constraint(std::move(t), Relation::GreaterEqual, 0.0, "min_leaf[" + std::to_string(n) + "]");
  }
}

void attach_recall_floor(Formulation& form, double floor) {
  require_complete(form, "a recall floor");
  require_binary_labels(form, "a recall floor");
  check_fraction(floor, "recall floor");
  const int positives = form.data.class_counts()[1];
  form.model.add_constraint(predicted_count(form, 1, 1), Relation::GreaterEqual, floor * positives,
                            "recall_floor");
}

void attach_specificity_floor(Formulation& form, double floor) {
  require_complete(form, "a specificity floor");
  require_binary_labels(form, "a specificity floor");
  check_fraction(floor, "specificity floor");
  const int negatives = form.data.class_counts()[0];
  form.model.add_constraint(predicted_count(form, 0, 0), Relation::GreaterEqual, floor * negatives,
                            "specificity_floor");
}

void attach_precision_floor(Formulation& form, double floor) {
  require_complete(form, "a precision floor");
  require_binary_labels(form, "a precision floor");
  check_fraction(floor, "precision floor");
  // TP >= floor * (TP + FP)
  std::vector<Term> t = concat(scaled(predicted_count(form, 1, 1), 1.0 - floor),
                               scaled(predicted_count(form, 0, 1), -floor));
  form.model.add_constraint(std::move(t), Relation::GreaterEqual, 0.0, "precision_floor");
}

void set_objective(Formulation& form, ObjectiveKind objective) {
  require_complete(form, "a class-conditional objective");
  const VariableLayout& L = form.layout;
  const std::vector<int> counts = form.data.class_counts();
  if (objective != ObjectiveKind::Accuracy) {
    for (int k = 0; k < L.n_classes; ++k) {
      if (counts[k] == 0) {
        throw Error(ErrorCode::EmptyClass, "class '" + form.data.class_names[k] + "' has no training rows");
      }
    }
  }
  LinearModel& m = form.model;
  m.clear_objective();
  const double keep = 1.0 - form.lambda;
  auto add = [&](const std::vector<Term>& terms, double c) {
    for (const Term& t : terms) m.set_objective_coefficient(t.var, m.variable(t.var).objective + c * t.coef);
  };
  switch (objective) {
    case ObjectiveKind::Accuracy:
      for (int k = 0; k < L.n_classes; ++k) add(predicted_count(form, k, k), keep);
      m.objective_granularity = objective_lattice(form.lambda);
      break;
    case ObjectiveKind::BalancedAccuracy:
      for (int k = 0; k < L.n_classes; ++k) add(predicted_count(form, k, k), keep / (L.n_classes * counts[k]));
      break;
    case ObjectiveKind::Sensitivity:
      require_binary_labels(form, "the sensitivity objective");
      add(predicted_count(form, 1, 1), keep / counts[1]);
      break;
    case ObjectiveKind::WorstCaseAccuracy: {
      VariableLayout& layout = form.layout;
      if (layout.tau < 0) {
        layout.tau = m.add_variable("tau", 0.0, 1.0, false);
        for (int k = 0; k < L.n_classes; ++k) {
          std::vector<Term> t = scaled(predicted_count(form, k, k), -1.0);
          t.push_back({layout.tau, static_cast<double>(counts[k])});
          m.add_constraint(std::move(t), Relation::LessEqual, 0.0, "worst_case[" + std::to_string(k) + "]");
        }
      }
      m.set_objective_coefficient(layout.tau, keep);
      break;
    }
  }
  penalize_splits(form);
  form.objective = objective;
}

const char* to_string(FairnessKind kind) {
  switch (kind) {
    case FairnessKind::StatisticalParity: return "stat-parity";
    case FairnessKind::ConditionalStatisticalParity: return "cond-stat-parity";
    case FairnessKind::PredictiveEquality: return "pred-equality";
    case FairnessKind::EqualizedOdds: return "equalized-odds";
    case FairnessKind::EqualOpportunity: return "equal-opportunity";
  }
  return "?";
}

FairnessSpec parse_fairness(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) {
    throw Error(ErrorCode::InvalidArgument, "fairness spec must be kind:delta:protected[:legitimate]");
  }
  FairnessSpec spec;
  bool known = false;
  for (FairnessKind k : {FairnessKind::StatisticalParity, FairnessKind::ConditionalStatisticalParity,
                         FairnessKind::PredictiveEquality, FairnessKind::EqualizedOdds,
                         FairnessKind::EqualOpportunity}) {
    if (parts[0] == to_string(k)) {
      spec.kind = k;
      known = true;
    }
  }
  if (!known) throw Error(ErrorCode::InvalidArgument, "unknown fairness kind '" + parts[0] + "'");
  try {
    std::size_t used = 0;
    spec.delta = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "fairness delta '" + parts[1] + "' is not a number");
  }
  spec.protected_column = parts[2];
  if (parts.size() == 4) spec.legitimate_column = parts[3];
  if (spec.kind == FairnessKind::ConditionalStatisticalParity && spec.legitimate_column.empty()) {
    throw Error(ErrorCode::InvalidArgument, "conditional statistical parity needs a legitimate column");
  }
  return spec;
}

void attach_fairness(Formulation& form, const FairnessSpec& spec) {
  require_complete(form, "fairness constraints");
  require_binary_labels(form, "fairness constraints");
  check_fraction(spec.delta, "fairness delta");
  const int N = form.layout.n_rows;
  const std::vector<std::string>& groups =
      spec.groups.empty() ? form.data.attribute(spec.protected_column) : spec.groups;
  if (static_cast<int>(groups.size()) != N) {
    throw Error(ErrorCode::DimensionMismatch, "protected values do not match the rows");
  }
  const bool conditional = spec.kind == FairnessKind::ConditionalStatisticalParity;
  static const std::vector<std::string> no_levels;
  const std::vector<std::string>& levels =
      !conditional ? no_levels
                   : (spec.levels.empty() ? form.data.attribute(spec.legitimate_column) : spec.levels);
  if (conditional && static_cast<int>(levels.size()) != N) {
    throw Error(ErrorCode::DimensionMismatch, "legitimate-factor values do not match the rows");
  }

  std::vector<std::string> group_values(groups.begin(), groups.end());
  std::sort(group_values.begin(), group_values.end());
  group_values.erase(std::unique(group_values.begin(), group_values.end()), group_values.end());
  std::vector<std::string> level_values{""};
  if (conditional) {
    level_values.assign(levels.begin(), levels.end());
    std::sort(level_values.begin(), level_values.end());
    level_values.erase(std::unique(level_values.begin(), level_values.end()), level_values.end());
  }
  std::vector<int> label_filter{-1};
  switch (spec.kind) {
    case FairnessKind::PredictiveEquality: label_filter = {0}; break;
    case FairnessKind::EqualOpportunity: label_filter = {1}; break;
    case FairnessKind::EqualizedOdds: label_filter = {0, 1}; break;
    default: break;
  }

  const std::string name = to_string(spec.kind);
  for (const std::string& lvl : level_values) {
    for (int k : label_filter) {
      auto in_cell = [&](int i, const std::string& g) {
        return groups[i] == g && (!conditional || levels[i] == lvl) && (k < 0 || form.data.y[i] == k);
      };
      std::vector<int> count(group_values.size(), 0);
      std::vector<std::vector<Term>> positives(group_values.size());
      for (std::size_t gi = 0; gi < group_values.size(); ++gi) {
        for (int i = 0; i < N; ++i) {
          if (!in_cell(i, group_values[gi])) continue;
          ++count[gi];
          for (const Term& t : predicted_flow_terms(form.layout, i, 1)) positives[gi].push_back(t);
        }
        if (count[gi] == 0) {
          std::string cell = "(p=" + group_values[gi];
          if (conditional) cell += ", l=" + lvl;
          if (k >= 0) cell += ", k=" + std::to_string(k);
          cell += ")";
          throw Error(ErrorCode::EmptyGroupCell, "no rows in group cell " + cell);
        }
      }
      for (std::size_t a = 0; a < group_values.size(); ++a) {
        for (std::size_t b = a + 1; b < group_values.size(); ++b) {
          // |A_a / N_a - A_b / N_b| <= delta, multiplied through by N_a N_b
          std::vector<Term> diff = concat(scaled(positives[a], count[b]), scaled(positives[b], -count[a]));
          const double slack = spec.delta * count[a] * count[b];
          const std::string tag = "[" + group_values[a] + "," + group_values[b] + (conditional ? "|" + lvl : "") +
                                  (k >= 0 ? ",y=" + std::to_string(k) : "") + "]";
          form.model.add_constraint(diff, Relation::LessEqual, slack, name + "_hi" + tag);
          form.model.add_constraint(std::move(diff), Relation::GreaterEqual, -slack, name + "_lo" + tag);
        }
      }
    }
  }
}

}  // namespace strongtree
