#include "strongtree/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "strongtree/error.hpp"
#include "strongtree/metrics.hpp"

namespace strongtree {

void ExperimentPlan::validate() const {
  if (datasets.empty()) throw Error(ErrorCode::InvalidArgument, "benchmark needs at least one dataset");
  if (depths.empty()) throw Error(ErrorCode::InvalidArgument, "depth grid is empty");
  if (lambdas.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  if (engines.empty()) throw Error(ErrorCode::InvalidArgument, "engine list is empty");
  if (seeds <= 0) throw Error(ErrorCode::InvalidArgument, "seed count must be positive");
  if (!(time_limit > 0.0)) throw Error(ErrorCode::InvalidArgument, "time limit must be positive");
  for (int d : depths) {
    if (d < 1) throw Error(ErrorCode::DepthTooSmall, "depth must be at least 1");
  }
  for (double l : lambdas) {
    if (l < 0.0 || l > 1.0) throw Error(ErrorCode::InvalidArgument, "lambda outside [0,1]");
  }
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

std::string format_summary(const Summary& s) {
  if (s.count == 0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", s.mean, s.stddev);
  return buf;
}

std::vector<BenchmarkRow> run_benchmark(const ExperimentPlan& plan,
                                        const std::function<void(const std::string&)>& progress) {
  plan.validate();
  std::vector<BenchmarkRow> rows;
  for (const DatasetSource& src : plan.datasets) {
    const std::string name = src.name.empty() ? src.path : src.name;
    BinaryDataset full;
    std::string load_error;
    try {
      full = binarize(load_csv(src.path, src.label, src.load));
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (int depth : plan.depths) {
      for (Engine engine : plan.engines) {
        BenchmarkRow row;
        row.dataset = name;
        row.depth = depth;
        row.engine = engine;
        row.formulation = plan.formulation;
        if (!load_error.empty()) {
          row.failed = plan.seeds;
          row.failures.push_back(load_error);
          rows.push_back(std::move(row));
          continue;
        }
        for (int s = 0; s < plan.seeds; ++s) {
          const std::uint64_t seed = plan.first_seed + static_cast<std::uint64_t>(s);
          try {
            SplitSpec spec = plan.split;
            spec.seed = seed;
            const DatasetSplit parts = split(full, spec);
            TrainOptions opts;
            opts.depth = depth;
            opts.engine = engine;
            opts.formulation = plan.formulation;
            opts.solver.time_limit = plan.time_limit;
            opts.solver.threads = plan.threads;
            opts.solver.node_batch = plan.node_batch;
            bool have = false;
            double best_cal = -1.0;
            TrainResult best;
            for (double lambda : plan.lambdas) {
              if (plan.formulation == FormulationKind::FlowBalanced && lambda != 0.0) continue;
              opts.lambda = lambda;
              TrainResult r = train(parts.train, opts);
              if (!r.has_tree) continue;
              const double cal = parts.calibration.n_rows() > 0
                                     ? evaluate(r.tree, parts.calibration).accuracy
                                     : evaluate(r.tree, parts.train).accuracy;
              if (!have || cal > best_cal + 1e-12) {
                have = true;
                best_cal = cal;
                best = std::move(r);
              }
            }
            if (!have) throw Error(ErrorCode::InvalidArgument, "no incumbent within the time limit");
            row.chosen_lambda.push_back(best.tree.stats.lambda);
            row.objective.push_back(best.mio.objective);
            row.train_accuracy.push_back(evaluate(best.tree, parts.train).accuracy);
            if (parts.test.n_rows() > 0) row.test_accuracy.push_back(evaluate(best.tree, parts.test).accuracy);
            row.gap.push_back(best.mio.gap);
            row.seconds.push_back(best.mio.stats.seconds);
            row.nodes.push_back(static_cast<double>(best.mio.stats.nodes));
            ++row.completed;
          } catch (const std::exception& e) {
            ++row.failed;
            row.failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
          }
          if (progress) {
            progress(name + " depth=" + std::to_string(depth) + " engine=" + to_string(engine) +
                     " seed=" + std::to_string(seed) + " done");
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string format_benchmark(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "# " << kBenchmarkSchema << '\n';
  out << "dataset\tdepth\tengine\tformulation\tcompleted\tfailed\tlambda\tobjective\ttrain_acc\ttest_acc\tgap\t"
         "seconds\tnodes\tnotes\n";
  for (const BenchmarkRow& r : rows) {
    std::string notes;
    for (const std::string& f : r.failures) {
      if (!notes.empty()) notes += "; ";
      for (char c : f) notes += (c == '\t' || c == '\n') ? ' ' : c;
    }
    out << r.dataset << '\t' << r.depth << '\t' << to_string(r.engine) << '\t' << to_string(r.formulation) << '\t'
        << r.completed << '\t' << r.failed << '\t' << format_summary(summarize(r.chosen_lambda)) << '\t'
        << format_summary(summarize(r.objective)) << '\t' << format_summary(summarize(r.train_accuracy)) << '\t'
        << format_summary(summarize(r.test_accuracy)) << '\t' << format_summary(summarize(r.gap)) << '\t'
        << format_summary(summarize(r.seconds)) << '\t' << format_summary(summarize(r.nodes)) << '\t'
        << (notes.empty() ? "-" : notes) << '\n';
  }
  return out.str();
}

namespace {

double ratio(double optimum, double bound) {
  if (std::abs(bound) < 1e-12) return std::abs(optimum) < 1e-12 ? 1.0 : 0.0;
  return optimum / bound;
}

}  // namespace

RelaxationReport compare_relaxations(const BinaryDataset& data, int depth, double lambda,
                                     const SolverConfig& solver) {
  RelaxationReport r;
  r.lambda = lambda;
  const Formulation flow =
      lambda == 0.0 ? build_flow_balanced(data, depth) : build_flow_regularized(data, depth, lambda);
  const Formulation oct = build_oct_baseline(data, depth, lambda, lambda == 0.0);
  r.flow_bound = lp_bound(flow.model);
  r.oct_bound = lp_bound(oct.model);
  const MioResult mio = solve_mio(flow.model, {}, solver);
  if (!mio.has_incumbent) throw Error(ErrorCode::NumericalBreakdown, "no integral solution found");
  r.optimum = mio.objective;
  r.flow_ratio = ratio(r.optimum, r.flow_bound);
  r.oct_ratio = ratio(r.optimum, r.oct_bound);
  return r;
}

std::string format_relaxation(const RelaxationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "lambda=%.4g\nflow_lp_bound=%.6f\noct_lp_bound=%.6f\nmio_objective=%.6f\n"
                "flow_root_ratio=%.6f\noct_root_ratio=%.6f\n",
                r.lambda, r.flow_bound, r.oct_bound, r.optimum, r.flow_ratio, r.oct_ratio);
  return buf;
}

}  // namespace strongtree
