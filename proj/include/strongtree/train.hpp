#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "strongtree/benders.hpp"
#include "strongtree/branch_bound.hpp"
#include "strongtree/constraints.hpp"
#include "strongtree/formulations.hpp"
#include "strongtree/tree.hpp"

namespace strongtree {

enum class Engine { Flow, Benders };

const char* to_string(Engine engine);
Engine parse_engine(const std::string& text);
/// Accepts flow | flow-reg | complete | oct.
FormulationKind parse_formulation(const std::string& text);

struct TrainOptions {
  int depth = 2;
  Engine engine = Engine::Flow;
  FormulationKind formulation = FormulationKind::FlowRegularized;
  double lambda = 0.0;
  ObjectiveKind objective = ObjectiveKind::Accuracy;
  std::optional<int> max_splits;
  std::optional<int> max_features;
  std::optional<int> min_leaf;
  std::optional<double> recall_floor;
  std::optional<double> specificity_floor;
  std::optional<double> precision_floor;
  std::vector<FairnessSpec> fairness;
  /// Drop binary columns derived from protected and legitimate columns.
  bool exclude_protected = false;
  SolverConfig solver;
  std::function<void(const std::string&)> cut_log;
  /// When set, the model is written in LP format before solving.
  std::string dump_lp;
};

struct TrainResult {
  TrainedTree tree;  // empty stats.status "infeasible" when no tree exists
  Formulation formulation;
  MioResult mio;
  SeparationStats separation;
  bool has_tree = false;
};

/// Builds the requested model (master for the Benders engine), attaches side
/// constraints and solves it.
Formulation build_model(const BinaryDataset& data, const TrainOptions& options);
TrainResult train(const BinaryDataset& data, const TrainOptions& options);

}  // namespace strongtree
