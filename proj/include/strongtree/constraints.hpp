#pragma once

#include <string>
#include <vector>

#include "strongtree/formulations.hpp"

namespace strongtree {

/// At most `max_splits` branching nodes. Needs a formulation with leaf flags p.
void attach_sparsity(Formulation& form, int max_splits);

/// At most `max_features` distinct features across all branching nodes. Adds a
/// continuous indicator b_f in [0,1] per feature.
void attach_feature_budget(Formulation& form, int max_features);

/// Every leaf other than the root receives at least `n_min` datapoints of flow.
/// Under flow-reg only correctly classified points carry flow, so the count
/// covers those; under the complete flow it covers every point.
void attach_min_leaf(Formulation& form, int n_min);

/// Class-conditional floors on the complete flow (binary labels, positive class 1).
void attach_recall_floor(Formulation& form, double floor);
void attach_specificity_floor(Formulation& form, double floor);
void attach_precision_floor(Formulation& form, double floor);

/// Replaces the objective of a complete flow formulation. Lambda still
/// penalizes splits. Worst-case accuracy uses an epigraph variable tau.
void set_objective(Formulation& form, ObjectiveKind objective);

enum class FairnessKind {
  StatisticalParity,
  ConditionalStatisticalParity,
  PredictiveEquality,
  EqualizedOdds,
  EqualOpportunity,
};

const char* to_string(FairnessKind kind);

struct FairnessSpec {
  FairnessKind kind = FairnessKind::StatisticalParity;
  double delta = 0.0;
  std::string protected_column;
  std::string legitimate_column;  // conditional statistical parity only
  /// Explicit per-row group / level values; when empty they are read from the
  /// dataset's source columns.
  std::vector<std::string> groups;
  std::vector<std::string> levels;
};

/// Parses "kind:delta:protected[:legitimate]", e.g. "stat-parity:0.05:sex".
FairnessSpec parse_fairness(const std::string& text);

/// Bounds the gap in positive-prediction rates between every pair of groups
/// (within each cell) by delta, as two linear rows with count constants.
void attach_fairness(Formulation& form, const FairnessSpec& spec);

}  // namespace strongtree
