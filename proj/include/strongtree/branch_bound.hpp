#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "strongtree/linear_model.hpp"

namespace strongtree {

enum class MioStatus { Optimal, Infeasible, TimeLimit };

const char* to_string(MioStatus status);

/// Called with an LP-integral node solution (integer columns rounded). Returns
/// the constraints it violates; an empty result accepts the point.
using LazySeparator = std::function<std::vector<Constraint>(std::span<const double> x)>;

struct SolverConfig {
  double time_limit = kInfinity;  // seconds
  double integrality_tolerance = 1e-6;
  double gap_tolerance = 1e-6;
  long node_limit = -1;  // negative: unlimited
  /// Nodes evaluated together. Results depend on this value but never on `threads`.
  int node_batch = 1;
  int threads = 1;
  /// Receives progress lines `node=<k> bound=<v> incumbent=<v> gap=<v> cuts=<n>`.
  std::function<void(const std::string&)> log;
  long log_every = 1000;
};

struct SolveStats {
  long nodes = 0;
  long lp_iterations = 0;
  long cuts = 0;
  long separator_calls = 0;
  long incumbents = 0;
  double seconds = 0.0;
};

struct MioResult {
  MioStatus status = MioStatus::Infeasible;
  bool has_incumbent = false;
  std::vector<double> values;
  double objective = -kInfinity;
  double bound = kInfinity;
  double gap = kInfinity;
  SolveStats stats;
  std::vector<Constraint> cut_pool;
};

/// Relative gap (bound - incumbent) / max(1, |bound|).
double relative_gap(double bound, double incumbent);

/// Maximizes `model` over its integer columns by LP-based branch-and-bound.
/// Depth-first until the first incumbent, best-bound afterwards; branches on
/// the most fractional column (lowest index on ties).
MioResult solve_mio(const LinearModel& model, const LazySeparator& separator = {},
                    const SolverConfig& config = {});

}  // namespace strongtree
