#pragma once

#include <span>
#include <string>
#include <vector>

#include "strongtree/dataset.hpp"
#include "strongtree/flow_graph.hpp"
#include "strongtree/linear_model.hpp"
#include "strongtree/tree.hpp"

namespace strongtree {

enum class FormulationKind {
  FlowBalanced,
  FlowRegularized,
  CompleteFlow,
  OctBaseline,
  BendersBalanced,
  BendersRegularized,
};

enum class ObjectiveKind { Accuracy, BalancedAccuracy, WorstCaseAccuracy, Sensitivity };

const char* to_string(FormulationKind kind);
const char* to_string(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& text);

/// Where each decision symbol lives in the model. Unused entries are -1 or empty.
struct VariableLayout {
  FormulationKind kind = FormulationKind::FlowBalanced;
  int depth = 1;
  int n_features = 0;
  int n_classes = 0;
  int n_rows = 0;
  SymbolTable symbols;               // b[node][f], w[node][k]
  std::vector<int> p;                // [node]
  FlowGraph graph;                   // flow kinds and Benders masters
  std::vector<std::vector<int>> z;   // [i][arc]
  std::vector<int> g;                // [i], Benders masters
  std::vector<int> v;                // [node], OCT
  std::vector<std::vector<int>> zeta;  // [i][terminal - 2^d], OCT
  std::vector<int> L, Q, l;          // [terminal - 2^d], OCT
  std::vector<std::vector<int>> Qk;  // [terminal - 2^d][k], OCT
  int tau = -1;                      // worst-case accuracy epigraph
  std::vector<int> feature_used;     // [f], feature budget

  bool has_p() const;
  bool is_flow() const;
};

struct Formulation {
  LinearModel model;
  VariableLayout layout;
  BinaryDataset data;
  double lambda = 0.0;
  ObjectiveKind objective = ObjectiveKind::Accuracy;
};

/// Objective lattice spacing of (1-lambda) * count - lambda * count: 1/q for
/// the smallest q <= 1000 with lambda * q integral, 0 if there is none.
double objective_lattice(double lambda);

Formulation build_flow_balanced(const BinaryDataset& data, int depth);
Formulation build_flow_regularized(const BinaryDataset& data, int depth, double lambda);
Formulation build_complete_flow(const BinaryDataset& data, int depth,
                                ObjectiveKind objective = ObjectiveKind::Accuracy, double lambda = 0.0);
/// With `balanced` the split indicators p are fixed to 1 (every branching node splits).
Formulation build_oct_baseline(const BinaryDataset& data, int depth, double lambda, bool balanced = false);

/// Benders master over b, w, (p) and one continuous g^i in [0,1] per datapoint.
/// `regularized` selects the imbalanced tree with leaf flags and the lambda penalty.
Formulation build_benders_master(const BinaryDataset& data, int depth, double lambda, bool regularized);

/// z columns of datapoint i whose flow counts as a correct classification.
std::vector<Term> correct_flow_terms(const VariableLayout& layout, const BinaryDataset& data, int i);
/// Complete flow only: z columns of datapoint i entering sink t_k.
std::vector<Term> predicted_flow_terms(const VariableLayout& layout, int i, int k);

/// Reads the tree encoded by the b, w, p columns of `values` (no checks).
TrainedTree decode_tree(const VariableLayout& layout, std::span<const double> values,
                        const BinaryDataset& data);
/// Checks integrality and feasibility, then decodes.
TrainedTree extract_tree(const Formulation& formulation, std::span<const double> values);

/// Optimal value of the LP relaxation (objective offset included).
double lp_bound(const LinearModel& model);

}  // namespace strongtree
