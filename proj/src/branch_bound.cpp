#include "strongtree/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <thread>

#include "strongtree/error.hpp"
#include "strongtree/simplex.hpp"

namespace strongtree {

const char* to_string(MioStatus status) {
  switch (status) {
    case MioStatus::Optimal: return "optimal";
    case MioStatus::Infeasible: return "infeasible";
    case MioStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

double relative_gap(double bound, double incumbent) {
  if (!std::isfinite(incumbent)) return kInfinity;
  return std::max(0.0, bound - incumbent) / std::max(1.0, std::abs(bound));
}

namespace {

struct BoundChange {
  int var;
  double lo;
  double hi;
};

struct OpenNode {
  long id = 0;
  double bound = kInfinity;  // parent LP bound including the offset
  std::vector<BoundChange> fixes;
  std::shared_ptr<const SimplexEngine::Basis> basis;
};

struct EngineSlot {
  SimplexEngine engine;
  std::vector<BoundChange> applied;
  std::size_t synced_cuts = 0;
};

using Clock = std::chrono::steady_clock;

class BranchAndBound {
 public:
  BranchAndBound(const LinearModel& model, const LazySeparator& separator, const SolverConfig& config)
      : model_(model), separator_(separator), config_(config), master_{SimplexEngine(model), {}, 0} {
    for (const Variable& v : model.variables()) {
      if (v.is_integer && !(std::isfinite(v.lower) && std::isfinite(v.upper))) {
        throw Error(ErrorCode::InvalidArgument, "integer column '" + v.name + "' must be bounded");
      }
    }
    start_ = Clock::now();
    master_.engine.set_interrupt([this] { return out_of_time(); });
  }

  MioResult run();

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool out_of_time() const { return elapsed() > config_.time_limit; }

  double lattice_bound(double bound) const {
    const double step = model_.objective_granularity;
    if (step <= 0.0 || !std::isfinite(bound)) return bound;
    const double k = std::floor((bound - model_.objective_offset) / step + 1e-6);
    return model_.objective_offset + k * step;
  }

  bool prunable(double bound) const {
    if (!result_.has_incumbent) return false;
    const double inc = result_.objective;
    if (model_.objective_granularity > 0.0) return lattice_bound(bound) <= inc + 1e-9;
    return bound - inc <= config_.gap_tolerance * std::max(1.0, std::abs(bound));
  }

  void prepare(EngineSlot& slot, const OpenNode& node) const {
    for (const BoundChange& c : slot.applied) {
      slot.engine.set_bounds(c.var, model_.variable(c.var).lower, model_.variable(c.var).upper);
    }
    for (const BoundChange& c : node.fixes) slot.engine.set_bounds(c.var, c.lo, c.hi);
    slot.applied = node.fixes;
    if (node.basis) slot.engine.restore(*node.basis);
  }

  void sync_cuts(EngineSlot& slot) const {
    for (; slot.synced_cuts < result_.cut_pool.size(); ++slot.synced_cuts) {
      slot.engine.add_row(result_.cut_pool[slot.synced_cuts]);
    }
  }

  LpStatus solve(EngineSlot& slot) {
    const long before = slot.engine.iterations();
    const LpStatus s = slot.engine.solve();
    result_.stats.lp_iterations += slot.engine.iterations() - before;
    return s;
  }

  void process(EngineSlot& slot, const OpenNode& node);
  int most_fractional(const std::vector<double>& x) const;
  void log_progress(bool force);
  double open_bound() const;
  std::optional<std::size_t> select_node() const;

  const LinearModel& model_;
  const LazySeparator& separator_;
  const SolverConfig& config_;
  EngineSlot master_;
  std::vector<OpenNode> open_;
  MioResult result_;
  long next_id_ = 0;
  long last_log_ = 0;
  Clock::time_point start_;
};

int BranchAndBound::most_fractional(const std::vector<double>& x) const {
  int best = -1;
  double best_frac = config_.integrality_tolerance;
  for (int j = 0; j < model_.num_variables(); ++j) {
    if (!model_.variable(j).is_integer) continue;
    const double frac = std::abs(x[j] - std::round(x[j]));
    if (frac > best_frac) {
      best_frac = frac;
      best = j;
    }
  }
  return best;
}

double BranchAndBound::open_bound() const {
  double b = -kInfinity;
  for (const OpenNode& n : open_) b = std::max(b, n.bound);
  return b;
}

std::optional<std::size_t> BranchAndBound::select_node() const {
  if (open_.empty()) return std::nullopt;
  if (!result_.has_incumbent) return open_.size() - 1;  // dive
  std::size_t best = 0;
  for (std::size_t k = 1; k < open_.size(); ++k) {
    if (open_[k].bound > open_[best].bound ||
        (open_[k].bound == open_[best].bound && open_[k].id < open_[best].id)) {
      best = k;
    }
  }
  return best;
}

void BranchAndBound::log_progress(bool force) {
  if (!config_.log) return;
  if (!force && result_.stats.nodes - last_log_ < config_.log_every) return;
  last_log_ = result_.stats.nodes;
  double bound = std::max(open_bound(), result_.has_incumbent ? result_.objective : -kInfinity);
  if (open_.empty() && !result_.has_incumbent) bound = -kInfinity;
  char line[256];
  std::snprintf(line, sizeof line, "node=%ld bound=%.6g incumbent=%.6g gap=%.6g cuts=%ld",
                result_.stats.nodes, lattice_bound(bound),
                result_.has_incumbent ? result_.objective : -kInfinity,
                result_.has_incumbent ? relative_gap(lattice_bound(bound), result_.objective)
                                      : kInfinity,
                result_.stats.cuts);
  config_.log(line);
}

void BranchAndBound::process(EngineSlot& slot, const OpenNode& node) {
  ++result_.stats.nodes;
  for (;;) {
    sync_cuts(slot);
    const LpStatus status = solve(slot);
    if (status == LpStatus::Interrupted) {
      open_.push_back(node);  // keeps its bound in the final report
      return;
    }
    if (status == LpStatus::Infeasible) return;
    if (status == LpStatus::Unbounded) {
      throw Error(ErrorCode::InvalidArgument, "LP relaxation is unbounded");
    }
    const double bound = slot.engine.objective() + model_.objective_offset;
    if (prunable(bound)) return;
    std::vector<double> x = slot.engine.primal();
    const int branch = most_fractional(x);
    if (branch >= 0) {
      auto basis = std::make_shared<const SimplexEngine::Basis>(slot.engine.basis());
      const double v = x[branch];
      OpenNode down{next_id_++, bound, node.fixes, basis};
      down.fixes.push_back({branch, model_.variable(branch).lower, std::floor(v)});
      OpenNode up{next_id_++, bound, node.fixes, basis};
      up.fixes.push_back({branch, std::ceil(v), model_.variable(branch).upper});
      // the child in the rounding direction is explored first (ties go up)
      const bool up_first = v - std::floor(v) >= 0.5;
      if (up_first) {
        open_.push_back(std::move(down));
        open_.push_back(std::move(up));
      } else {
        open_.push_back(std::move(up));
        open_.push_back(std::move(down));
      }
      return;
    }
    for (int j = 0; j < model_.num_variables(); ++j) {
      if (model_.variable(j).is_integer) x[j] = std::round(x[j]);
    }
    if (separator_) {
      ++result_.stats.separator_calls;
      std::vector<Constraint> cuts = separator_(x);
      std::erase_if(cuts, [&](const Constraint& c) { return c.violation(x) <= 1e-6; });
      if (!cuts.empty()) {
        for (Constraint& c : cuts) result_.cut_pool.push_back(std::move(c));
        result_.stats.cuts += static_cast<long>(cuts.size());
        continue;
      }
    }
    const double value = model_.objective_value(x);
    if (!result_.has_incumbent || value > result_.objective) {
      result_.has_incumbent = true;
      result_.objective = value;
      result_.values = std::move(x);
      ++result_.stats.incumbents;
      log_progress(true);
    }
    return;
  }
}

MioResult BranchAndBound::run() {
  OpenNode root{next_id_++, kInfinity, {}, nullptr};
  open_.push_back(root);
  bool stopped = false;
  const int batch = std::max(1, config_.node_batch);
  while (!open_.empty()) {
    if (out_of_time() || (config_.node_limit >= 0 && result_.stats.nodes >= config_.node_limit)) {
      stopped = true;
      break;
    }
    if (batch == 1) {
      const std::size_t k = *select_node();
      OpenNode node = std::move(open_[k]);
      open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(k));
      if (prunable(node.bound)) continue;
      prepare(master_, node);
      process(master_, node);
    } else {
      std::vector<OpenNode> picked;
      while (static_cast<int>(picked.size()) < batch && !open_.empty()) {
        const std::size_t k = *select_node();
        OpenNode node = std::move(open_[k]);
        open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(k));
        if (!prunable(node.bound)) picked.push_back(std::move(node));
      }
      sync_cuts(master_);
      std::vector<EngineSlot> slots(picked.size(), master_);
      std::vector<long> iters(picked.size(), 0);
      std::vector<std::exception_ptr> errors(picked.size());
      auto work = [&](std::size_t from) {
        for (std::size_t i = from; i < picked.size(); i += static_cast<std::size_t>(std::max(1, config_.threads))) {
          try {
            const long before = slots[i].engine.iterations();
            prepare(slots[i], picked[i]);
            slots[i].engine.solve();
            iters[i] = slots[i].engine.iterations() - before;
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      };
      const int workers = std::min<int>(std::max(1, config_.threads), static_cast<int>(picked.size()));
      std::vector<std::thread> pool;
      for (int t = 1; t < workers; ++t) pool.emplace_back(work, static_cast<std::size_t>(t));
      work(0);
      for (std::thread& t : pool) t.join();
      for (std::size_t i = 0; i < picked.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        result_.stats.lp_iterations += iters[i];
        if (prunable(picked[i].bound)) continue;
        process(slots[i], picked[i]);
      }
    }
    log_progress(false);
  }

  result_.stats.seconds = elapsed();
  if (stopped) {
    result_.status = MioStatus::TimeLimit;
    double bound = open_bound();
    if (result_.has_incumbent) bound = std::max(bound, result_.objective);
    result_.bound = lattice_bound(bound);
  } else {
    result_.status = result_.has_incumbent ? MioStatus::Optimal : MioStatus::Infeasible;
    result_.bound = result_.has_incumbent ? result_.objective : -kInfinity;
  }
  result_.gap = result_.has_incumbent ? relative_gap(result_.bound, result_.objective) : kInfinity;
  log_progress(true);
  return std::move(result_);
}

}  // namespace

MioResult solve_mio(const LinearModel& model, const LazySeparator& separator,
                    const SolverConfig& config) {
  if (config.integrality_tolerance <= 0 || config.gap_tolerance <= 0) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  }
  BranchAndBound bb(model, separator, config);
  return bb.run();
}

}  // namespace strongtree
