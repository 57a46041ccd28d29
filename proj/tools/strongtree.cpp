#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "strongtree/error.hpp"
#include "strongtree/experiment.hpp"
#include "strongtree/metrics.hpp"
#include "strongtree/train.hpp"
#include "strongtree/tree.hpp"

using namespace strongtree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNoIncumbent = 4;

struct DataFlags {
  std::string path;
  std::string label;
  std::string kinds;
  std::string split;
  std::uint64_t seed = 0;
  std::string part = "all";
  bool strict_missing = false;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LoadOptions load_options(const DataFlags& f) {
  LoadOptions o;
  o.strict_missing = f.strict_missing;
  for (const std::string& kv : split_list(f.kinds, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--kinds expects col=kind, got '" + kv + "'");
    o.column_kinds[kv.substr(0, eq)] = parse_column_kind(kv.substr(eq + 1));
  }
  return o;
}

SplitSpec parse_split(const std::string& text, std::uint64_t seed) {
  const auto parts = split_list(text, ',');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidSplit, "--split expects three fractions, e.g. 0.5,0.25,0.25");
  SplitSpec s;
  s.seed = seed;
  s.train = std::stod(parts[0]);
  s.calibration = std::stod(parts[1]);
  s.test = std::stod(parts[2]);
  return s;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const std::string& t : split_list(text, ',')) out.push_back(std::stod(t));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const std::string& t : split_list(text, ',')) out.push_back(std::stoi(t));
  return out;
}

const BinaryDataset& pick_part(const DatasetSplit& s, const std::string& part) {
  if (part == "train") return s.train;
  if (part == "calibration") return s.calibration;
  if (part == "test") return s.test;
  throw Error(ErrorCode::InvalidArgument, "--part must be all, train, calibration or test");
}

/// Restricts `data` to the requested part of the split, if a split was given.
BinaryDataset restrict(const BinaryDataset& data, const DataFlags& f) {
  if (f.split.empty()) {
    if (f.part != "all") throw Error(ErrorCode::InvalidArgument, "--part needs --split");
    return data;
  }
  if (f.part == "all") return data;
  return pick_part(split(data, parse_split(f.split, f.seed)), f.part);
}

void add_data_flags(CLI::App* cmd, DataFlags& f, bool label_required) {
  cmd->add_option("--data", f.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  auto* label = cmd->add_option("--label", f.label, "Name of the label column");
  if (label_required) label->required();
  cmd->add_option("--kinds", f.kinds, "Column kinds, e.g. age=int,sex=cat,flag=bin");
  cmd->add_option("--split", f.split, "Train, calibration and test fractions, e.g. 0.5,0.25,0.25");
  cmd->add_option("--seed", f.seed, "Seed for --split");
  cmd->add_flag("--strict-missing", f.strict_missing, "Fail on missing cells instead of dropping the row");
}

double default_time_limit() {
  if (const char* env = std::getenv("STRONGTREE_TIME_LIMIT")) {
    try {
      const double v = std::stod(env);
      if (v > 0.0) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring STRONGTREE_TIME_LIMIT='" << env << "'\n";
  }
  return kInfinity;
}

std::function<void(const std::string&)> make_sink(const std::string& target,
                                                  std::shared_ptr<std::ofstream>& holder) {
  if (target.empty()) return {};
  if (target == "-") {
    return [](const std::string& line) { std::cerr << line << '\n'; };
  }
  holder = std::make_shared<std::ofstream>(target);
  if (!*holder) throw Error(ErrorCode::InvalidArgument, "cannot open " + target);
  auto h = holder;
  return [h](const std::string& line) { *h << line << '\n'; };
}

struct TrainFlags {
  DataFlags data;
  int depth = 2;
  std::string engine = "flow";
  std::string formulation = "flow-reg";
  double lambda = 0.0;
  std::string objective = "accuracy";
  std::vector<std::string> fair;
  bool exclude_protected = false;
  int min_leaf = -1;
  int max_splits = -1;
  int max_features = -1;
  double recall_floor = -1.0;
  double specificity_floor = -1.0;
  double precision_floor = -1.0;
  double time_limit = 0.0;
  int threads = 1;
  int node_batch = 1;
  std::string dump_lp;
  std::string log_cuts;
  bool verbose = false;
  std::string out = "tree.json";
};

int cmd_train(const TrainFlags& f) {
  const RawTable table = load_csv(f.data.path, f.data.label, load_options(f.data));
  for (const std::string& w : table.warnings) std::cerr << "warning: " << w << '\n';
  const BinaryDataset all = binarize(table);
  BinaryDataset train_part = all;
  SplitIndices parts;
  if (!f.data.split.empty()) {
    parts = split_indices(all.n_rows(), parse_split(f.data.split, f.data.seed));
    train_part = all.subset(parts.train);
  }

  TrainOptions o;
  o.depth = f.depth;
  o.engine = parse_engine(f.engine);
  o.formulation = parse_formulation(f.formulation);
  o.lambda = f.lambda;
  o.objective = parse_objective(f.objective);
  if (f.max_splits >= 0) o.max_splits = f.max_splits;
  if (f.max_features >= 0) o.max_features = f.max_features;
  if (f.min_leaf >= 0) o.min_leaf = f.min_leaf;
  if (f.recall_floor >= 0) o.recall_floor = f.recall_floor;
  if (f.specificity_floor >= 0) o.specificity_floor = f.specificity_floor;
  if (f.precision_floor >= 0) o.precision_floor = f.precision_floor;
  for (const std::string& spec : f.fair) o.fairness.push_back(parse_fairness(spec));
  o.exclude_protected = f.exclude_protected;
  o.solver.time_limit = f.time_limit > 0.0 ? f.time_limit : default_time_limit();
  o.solver.threads = f.threads;
  o.solver.node_batch = f.node_batch;
  if (f.verbose) o.solver.log = [](const std::string& line) { std::cerr << line << '\n'; };
  std::shared_ptr<std::ofstream> cut_file;
  o.cut_log = make_sink(f.log_cuts, cut_file);
  o.dump_lp = f.dump_lp;

  const TrainResult r = train(train_part, o);
  if (!r.has_tree) {
    if (r.mio.status == MioStatus::TimeLimit) {
      std::cerr << "time limit reached without an incumbent\n";
      return kExitNoIncumbent;
    }
    std::cerr << "model is infeasible\n";
    return kExitSolver;
  }
  write_tree(r.tree, f.out);
  const Metrics m = evaluate(r.tree, r.formulation.data);
  std::printf("status=%s objective=%.6f bound=%.6f gap=%.6f nodes=%ld cuts=%ld seconds=%.3f splits=%d "
              "train_accuracy=%.4f misclassified=%d",
              r.tree.stats.status.c_str(), r.mio.objective, r.mio.bound, r.mio.gap, r.mio.stats.nodes,
              r.mio.stats.cuts, r.mio.stats.seconds, r.tree.num_splits(), m.accuracy, m.rows - m.correct);
  if (!parts.test.empty()) {
    const BinaryDataset test = encode_like(table, r.tree.encoding, r.tree.class_names).subset(parts.test);
    std::printf(" test_accuracy=%.4f", evaluate(r.tree, test).accuracy);
  }
  std::printf(" tree=%s\n", f.out.c_str());
  return kExitOk;
}

struct PredictFlags {
  DataFlags data;
  std::string tree;
  std::string out;
};

BinaryDataset load_for_tree(const DataFlags& f, const TrainedTree& tree) {
  const RawTable table = load_csv(f.path, f.label, load_options(f));
  for (const std::string& w : table.warnings) std::cerr << "warning: " << w << '\n';
  return restrict(encode_like(table, tree.encoding, tree.class_names), f);
}

int cmd_predict(const PredictFlags& f) {
  const TrainedTree tree = read_tree(f.tree);
  const BinaryDataset data = load_for_tree(f.data, tree);
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open " + f.out);
  }
  std::ostream& out = f.out.empty() ? std::cout : file;
  out << "row,prediction\n";
  const std::vector<int> pred = predict_all(tree, data);
  for (int i = 0; i < data.n_rows(); ++i) out << data.source_rows[i] << ',' << tree.class_names[pred[i]] << '\n';
  return kExitOk;
}

struct EvaluateFlags {
  DataFlags data;
  std::string tree;
  std::string group;
};

int cmd_evaluate(const EvaluateFlags& f) {
  const TrainedTree tree = read_tree(f.tree);
  const BinaryDataset data = load_for_tree(f.data, tree);
  std::cout << format_metrics(evaluate(tree, data, f.group), tree.class_names);
  return kExitOk;
}

struct BenchmarkFlags {
  std::vector<std::string> data;
  std::string label;
  std::string kinds;
  std::string depths = "2,3,4,5";
  std::string lambdas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  int seeds = 5;
  std::uint64_t seed = 0;
  std::string engines = "flow,benders";
  std::string formulation = "flow-reg";
  std::string split = "0.5,0.25,0.25";
  double time_limit = 0.0;
  int threads = 1;
  int node_batch = 1;
  std::string out;
  bool quiet = false;
};

int cmd_benchmark(const BenchmarkFlags& f) {
  ExperimentPlan plan;
  DataFlags df;
  df.kinds = f.kinds;
  const LoadOptions load = load_options(df);
  for (const std::string& spec : f.data) {
    // path or path:label
    DatasetSource src;
    const auto colon = spec.rfind(':');
    if (colon != std::string::npos && colon > 1) {
      src.path = spec.substr(0, colon);
      src.label = spec.substr(colon + 1);
    } else {
      src.path = spec;
      src.label = f.label;
    }
    if (src.label.empty()) throw Error(ErrorCode::MissingLabelColumn, "no label column for " + src.path);
    src.name = src.path;
    src.load = load;
    plan.datasets.push_back(src);
  }
  plan.depths = parse_ints(f.depths);
  plan.lambdas = parse_doubles(f.lambdas);
  plan.seeds = f.seeds;
  plan.first_seed = f.seed;
  plan.engines.clear();
  for (const std::string& e : split_list(f.engines, ',')) plan.engines.push_back(parse_engine(e));
  plan.formulation = parse_formulation(f.formulation);
  plan.split = parse_split(f.split, f.seed);
  const double env_limit = default_time_limit();
  plan.time_limit = f.time_limit > 0.0 ? f.time_limit : (env_limit < kInfinity ? env_limit : 60.0);
  plan.threads = f.threads;
  plan.node_batch = f.node_batch;

  std::function<void(const std::string&)> progress;
  if (!f.quiet) progress = [](const std::string& line) { std::cerr << line << '\n'; };
  const std::string table = format_benchmark(run_benchmark(plan, progress));
  if (f.out.empty()) {
    std::cout << table;
  } else {
    std::ofstream file(f.out);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open " + f.out);
    file << table;
  }
  return kExitOk;
}

struct RelaxFlags {
  DataFlags data;
  int depth = 2;
  double lambda = 0.0;
  double time_limit = 0.0;
};

int cmd_relax(const RelaxFlags& f) {
  const BinaryDataset data = restrict(binarize(load_csv(f.data.path, f.data.label, load_options(f.data))), f.data);
  SolverConfig solver;
  solver.time_limit = f.time_limit > 0.0 ? f.time_limit : default_time_limit();
  std::cout << "depth=" << f.depth << '\n' << format_relaxation(compare_relaxations(data, f.depth, f.lambda, solver));
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NumericalBreakdown: return kExitSolver;
    default: return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal depth-bounded classification trees via flow-based MIO formulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "strongtree 0.1.0");

  TrainFlags tf;
  auto* train_cmd = app.add_subcommand("train", "Train a tree and write it as JSON");
  add_data_flags(train_cmd, tf.data, true);
  train_cmd->add_option("--depth", tf.depth, "Maximum depth")->capture_default_str();
  train_cmd->add_option("--engine", tf.engine, "flow | benders")->capture_default_str();
  train_cmd->add_option("--formulation", tf.formulation, "flow | flow-reg | complete | oct")->capture_default_str();
  train_cmd->add_option("--lambda", tf.lambda, "Split penalty in [0,1]")->capture_default_str();
  train_cmd->add_option("--objective", tf.objective,
                        "accuracy | balanced-accuracy | worst-case-accuracy | sensitivity (complete only)")
      ->capture_default_str();
  train_cmd->add_option("--fair", tf.fair,
                        "kind:delta:protected[:legitimate]; kinds stat-parity, cond-stat-parity, pred-equality, "
                        "equalized-odds, equal-opportunity (repeatable)");
  train_cmd->add_flag("--exclude-protected", tf.exclude_protected, "Do not branch on fairness columns");
  train_cmd->add_option("--min-leaf", tf.min_leaf, "Minimum datapoints per non-root leaf");
  train_cmd->add_option("--max-splits", tf.max_splits, "Maximum number of branching nodes");
  train_cmd->add_option("--max-features", tf.max_features, "Maximum number of distinct features used");
  train_cmd->add_option("--recall-floor", tf.recall_floor, "Minimum recall of class 1 (complete only)");
  train_cmd->add_option("--specificity-floor", tf.specificity_floor, "Minimum specificity (complete only)");
  train_cmd->add_option("--precision-floor", tf.precision_floor, "Minimum precision of class 1 (complete only)");
  train_cmd->add_option("--time-limit", tf.time_limit, "Seconds; default from STRONGTREE_TIME_LIMIT or none");
  train_cmd->add_option("--threads", tf.threads, "Worker threads for node evaluation")->capture_default_str();
  train_cmd->add_option("--node-batch", tf.node_batch, "Nodes evaluated per round")->capture_default_str();
  train_cmd->add_option("--dump-lp", tf.dump_lp, "Write the model in LP format to this path");
  train_cmd->add_option("--log-cuts", tf.log_cuts, "Write Benders cuts to this path (- for stderr)");
  train_cmd->add_flag("-v,--verbose", tf.verbose, "Print solver progress to stderr");
  train_cmd->add_option("-o,--out", tf.out, "Tree output path")->capture_default_str();

  PredictFlags pf;
  auto* predict_cmd = app.add_subcommand("predict", "Predict classes for the rows of a CSV file");
  add_data_flags(predict_cmd, pf.data, false);
  predict_cmd->add_option("--part", pf.data.part, "all | train | calibration | test")->capture_default_str();
  predict_cmd->add_option("--tree", pf.tree, "Tree JSON")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("-o,--out", pf.out, "Output CSV (default stdout)");

  EvaluateFlags ef;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a tree on a labelled CSV file");
  add_data_flags(evaluate_cmd, ef.data, true);
  evaluate_cmd->add_option("--part", ef.data.part, "all | train | calibration | test")->capture_default_str();
  evaluate_cmd->add_option("--tree", ef.tree, "Tree JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--group", ef.group, "Report rates per value of this column");

  BenchmarkFlags bf;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a depth x engine grid over seeds and print a TSV table");
  bench_cmd->add_option("--data", bf.data, "CSV path, or path:label (repeatable)")->required();
  bench_cmd->add_option("--label", bf.label, "Label column for --data entries without one");
  bench_cmd->add_option("--kinds", bf.kinds, "Column kinds, e.g. age=int,sex=cat");
  bench_cmd->add_option("--depths", bf.depths, "Comma-separated depths")->capture_default_str();
  bench_cmd->add_option("--lambdas", bf.lambdas, "Comma-separated lambda grid")->capture_default_str();
  bench_cmd->add_option("--seeds", bf.seeds, "Number of random splits")->capture_default_str();
  bench_cmd->add_option("--seed", bf.seed, "First split seed")->capture_default_str();
  bench_cmd->add_option("--engines", bf.engines, "Comma-separated engines")->capture_default_str();
  bench_cmd->add_option("--formulation", bf.formulation, "flow | flow-reg")->capture_default_str();
  bench_cmd->add_option("--split", bf.split, "Train, calibration and test fractions")->capture_default_str();
  bench_cmd->add_option("--time-limit", bf.time_limit, "Seconds per run; default STRONGTREE_TIME_LIMIT or 60");
  bench_cmd->add_option("--threads", bf.threads, "Worker threads per run")->capture_default_str();
  bench_cmd->add_option("--node-batch", bf.node_batch, "Nodes evaluated per round")->capture_default_str();
  bench_cmd->add_option("-o,--out", bf.out, "Output TSV (default stdout)");
  bench_cmd->add_flag("-q,--quiet", bf.quiet, "No progress on stderr");

  RelaxFlags rf;
  auto* relax_cmd = app.add_subcommand("relax", "Compare LP relaxation bounds of the flow and OCT models");
  add_data_flags(relax_cmd, rf.data, true);
  relax_cmd->add_option("--part", rf.data.part, "all | train | calibration | test")->capture_default_str();
  relax_cmd->add_option("--depth", rf.depth, "Maximum depth")->capture_default_str();
  relax_cmd->add_option("--lambda", rf.lambda, "Split penalty; 0 compares the balanced models")->capture_default_str();
  relax_cmd->add_option("--time-limit", rf.time_limit, "Seconds for the MIO solve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(tf);
    if (*predict_cmd) return cmd_predict(pf);
    if (*evaluate_cmd) return cmd_evaluate(ef);
    if (*bench_cmd) return cmd_benchmark(bf);
    if (*relax_cmd) return cmd_relax(rf);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
