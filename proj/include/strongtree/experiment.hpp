#pragma once

#include <functional>
#include <string>
#include <vector>

#include "strongtree/dataset.hpp"
#include "strongtree/train.hpp"

namespace strongtree {

struct DatasetSource {
  std::string name;
  std::string path;
  std::string label;
  LoadOptions load;
};

struct ExperimentPlan {
  std::vector<DatasetSource> datasets;
  std::vector<int> depths{2, 3, 4, 5};
  std::vector<double> lambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int seeds = 5;
  std::uint64_t first_seed = 0;
  std::vector<Engine> engines{Engine::Flow, Engine::Benders};
  FormulationKind formulation = FormulationKind::FlowRegularized;
  SplitSpec split;  // seed is overwritten per run
  double time_limit = 60.0;
  int threads = 1;
  int node_batch = 1;

  /// Throws InvalidArgument on empty grids or a non-positive time limit.
  void validate() const;
};

struct Summary {
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one value
};
Summary summarize(const std::vector<double>& values);
/// "mean±std" with two decimals, "-" when empty.
std::string format_summary(const Summary& s);

/// One (dataset, depth, engine) cell aggregated over seeds.
struct BenchmarkRow {
  std::string dataset;
  int depth = 0;
  Engine engine = Engine::Flow;
  FormulationKind formulation = FormulationKind::FlowRegularized;
  int completed = 0;
  int failed = 0;
  std::vector<double> chosen_lambda;
  std::vector<double> objective;
  std::vector<double> train_accuracy;
  std::vector<double> test_accuracy;
  std::vector<double> gap;
  std::vector<double> seconds;
  std::vector<double> nodes;
  std::vector<std::string> failures;
};

inline constexpr const char* kBenchmarkSchema = "strongtree.benchmark/1";

/// For every seed, trains one tree per lambda on the training part, keeps the
/// lambda with the best calibration accuracy (smallest lambda on ties) and
/// scores it on the test part. Failures are recorded in the row; the run goes on.
std::vector<BenchmarkRow> run_benchmark(const ExperimentPlan& plan,
                                        const std::function<void(const std::string&)>& progress = {});
/// Tab-separated table preceded by a "# strongtree.benchmark/1" line.
std::string format_benchmark(const std::vector<BenchmarkRow>& rows);

struct RelaxationReport {
  double lambda = 0.0;
  double flow_bound = 0.0;
  double oct_bound = 0.0;
  double optimum = 0.0;
  double flow_ratio = 0.0;  // optimum / flow_bound
  double oct_ratio = 0.0;   // optimum / oct_bound
};

/// LP bounds of the flow and OCT models at one depth. With lambda = 0 the
/// balanced variants are compared, otherwise the regularized ones.
RelaxationReport compare_relaxations(const BinaryDataset& data, int depth, double lambda = 0.0,
                                     const SolverConfig& solver = {});
std::string format_relaxation(const RelaxationReport& r);

}  // namespace strongtree
