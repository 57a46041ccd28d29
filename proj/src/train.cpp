#include "strongtree/train.hpp"

#include <algorithm>

#include "strongtree/error.hpp"

namespace strongtree {

const char* to_string(Engine engine) { return engine == Engine::Flow ? "flow" : "benders"; }

Engine parse_engine(const std::string& text) {
  if (text == "flow") return Engine::Flow;
  if (text == "benders") return Engine::Benders;
  throw Error(ErrorCode::InvalidArgument, "unknown engine '" + text + "' (flow | benders)");
}

FormulationKind parse_formulation(const std::string& text) {
  if (text == "flow") return FormulationKind::FlowBalanced;
  if (text == "flow-reg") return FormulationKind::FlowRegularized;
  if (text == "complete") return FormulationKind::CompleteFlow;
  if (text == "oct") return FormulationKind::OctBaseline;
  throw Error(ErrorCode::InvalidArgument, "unknown formulation '" + text + "' (flow | flow-reg | complete | oct)");
}

namespace {

bool needs_complete(const TrainOptions& o) {
  return o.objective != ObjectiveKind::Accuracy || o.recall_floor || o.specificity_floor || o.precision_floor ||
         !o.fairness.empty();
}

}  // namespace

Formulation build_model(const BinaryDataset& input, const TrainOptions& o) {
  BinaryDataset data = input;
  if (o.exclude_protected) {
    std::vector<std::string> sources;
    for (const FairnessSpec& f : o.fairness) {
      if (!f.protected_column.empty()) sources.push_back(f.protected_column);
      if (!f.legitimate_column.empty()) sources.push_back(f.legitimate_column);
    }
    data = data.without_sources(sources);
  }
  if (needs_complete(o) && o.formulation != FormulationKind::CompleteFlow) {
    throw Error(ErrorCode::IncompatibleFormulation,
                "class-conditional objectives, rate floors and fairness need --formulation complete");
  }
  if (o.formulation == FormulationKind::FlowBalanced && o.lambda != 0.0) {
    throw Error(ErrorCode::IncompatibleFormulation, "the balanced flow formulation has no lambda; use flow-reg");
  }
  Formulation form;
  if (o.engine == Engine::Benders) {
    if (o.formulation != FormulationKind::FlowBalanced && o.formulation != FormulationKind::FlowRegularized) {
      throw Error(ErrorCode::IncompatibleFormulation, "the Benders engine supports flow and flow-reg");
    }
    form = build_benders_master(data, o.depth, o.lambda, o.formulation == FormulationKind::FlowRegularized);
  } else {
    switch (o.formulation) {
      case FormulationKind::FlowBalanced: form = build_flow_balanced(data, o.depth); break;
      case FormulationKind::FlowRegularized: form = build_flow_regularized(data, o.depth, o.lambda); break;
      case FormulationKind::CompleteFlow: form = build_complete_flow(data, o.depth, o.objective, o.lambda); break;
      case FormulationKind::OctBaseline: form = build_oct_baseline(data, o.depth, o.lambda); break;
      default: throw Error(ErrorCode::InvalidArgument, "not a direct formulation");
    }
  }
  if (o.max_splits) attach_sparsity(form, *o.max_splits);
  if (o.max_features) attach_feature_budget(form, *o.max_features);
  if (o.min_leaf) attach_min_leaf(form, *o.min_leaf);
  if (o.recall_floor) attach_recall_floor(form, *o.recall_floor);
  if (o.specificity_floor) attach_specificity_floor(form, *o.specificity_floor);
  if (o.precision_floor) attach_precision_floor(form, *o.precision_floor);
  for (const FairnessSpec& f : o.fairness) attach_fairness(form, f);
  return form;
}

TrainResult train(const BinaryDataset& data, const TrainOptions& o) {
  TrainResult out;
  out.formulation = build_model(data, o);
  if (!o.dump_lp.empty()) out.formulation.model.write_lp_file(o.dump_lp);
  if (o.engine == Engine::Benders) {
    BendersOptions bo;
    bo.solver = o.solver;
    bo.cut_log = o.cut_log;
    BendersResult r = solve_benders(std::move(out.formulation), bo);
    out.formulation = std::move(r.master);
    out.mio = std::move(r.mio);
    out.separation = r.separation;
  } else {
    out.mio = solve_mio(out.formulation.model, {}, o.solver);
  }
  out.has_tree = out.mio.has_incumbent;
  if (out.has_tree) {
    out.tree = extract_tree(out.formulation, out.mio.values);
  } else {
    out.tree = TrainedTree::empty(o.depth, out.formulation.data.feature_names, out.formulation.data.class_names);
    out.tree.encoding = out.formulation.data.encoding;
  }
  TreeStats& s = out.tree.stats;
  s.status = to_string(out.mio.status);
  s.engine = to_string(o.engine);
  s.formulation = to_string(o.formulation);
  s.lambda = o.lambda;
  s.bound = out.mio.bound;
  s.gap = out.mio.gap;
  s.nodes = out.mio.stats.nodes;
  s.cuts = out.mio.stats.cuts;
  s.seconds = out.mio.stats.seconds;
  return out;
}

}  // namespace strongtree
