#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "strongtree/linear_model.hpp"

namespace strongtree {

class BasisFactor;

enum class LpStatus { Optimal, Infeasible, Unbounded, Interrupted };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  /// One dual per constraint; only meaningful when status is Optimal.
  std::vector<double> duals;
  long iterations = 0;
};

struct LpTolerances {
  double feasibility = 1e-7;
  double optimality = 1e-7;
  double pivot = 1e-9;
};

/// Bounded-variable revised simplex over a sparse LU of the basis. Every row
/// carries a slack (row activity + slack = rhs) whose bounds encode the
/// relation, so the initial slack basis is always available. The engine
/// keeps its basis between solves: bound changes and appended rows are
/// re-optimized with the dual simplex when the basis stays dual feasible.
class SimplexEngine {
 public:
  enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

  struct Basis {
    std::vector<int> basic;  // column per row
    std::vector<VarStatus> status;
    std::vector<double> weights;  // dual pricing weight per row, may be empty
  };

  explicit SimplexEngine(const LinearModel& model, LpTolerances tol = {});

  int num_structural() const { return n_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }
  void set_bounds(int j, double lower, double upper);

  /// Appends a constraint over structural columns; its slack enters the basis.
  int add_row(const Constraint& row);

  LpStatus solve();

  LpStatus status() const { return status_; }
  double objective() const;
  std::vector<double> primal() const;
  std::vector<double> duals() const;
  long iterations() const { return iterations_; }
  void set_iteration_limit(long limit) { iteration_limit_ = limit; }
  /// Polled every few iterations; returning true ends solve() with Interrupted.
  void set_interrupt(std::function<bool()> poll) { interrupt_ = std::move(poll); }

  Basis basis() const;
  /// Switches to `saved`. Rows appended after it was taken keep their slack basic.
  void restore(const Basis& saved);

 private:
  struct SparseRow {
    std::vector<int> idx;
    std::vector<double> val;
    double rhs = 0.0;
  };
  struct Interrupted {};

  int width() const { return static_cast<int>(lo_.size()); }
  void refactor();
  void place_nonbasic(int j);
  void recompute_basic_values();
  void recompute_reduced_costs();
  void column(int j, std::vector<double>& dense) const;
  void pivot_row(const std::vector<double>& rho, std::vector<double>& out) const;
  void exchange(int r, int q, const std::vector<double>& alpha, const std::vector<double>& rho);
  double infeasibility(int j) const;
  bool primal_feasible() const;
  bool dual_feasible() const;
  bool primal_simplex(bool phase_one);
  bool dual_simplex(long budget);
  bool perturbed_dual(long budget);
  void count_iteration();
  double original_violation() const;

  LpTolerances tol_;
  int n_ = 0;
  std::vector<double> cost_;  // per column, zero for slacks
  std::vector<double> lo_, hi_;
  std::vector<double> x_;
  std::vector<VarStatus> stat_;
  std::vector<SparseRow> rows_;  // original rows over structural columns
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural columns (row, value)
  std::vector<int> head_;  // basic column per row
  std::vector<double> d_;  // reduced costs
  std::vector<double> weight_;  // steepest-edge weight per row: |row r of B^-1|^2
  // deep-copied with the engine
  class FactorSlot {
   public:
    FactorSlot();
    FactorSlot(const FactorSlot& other);
    FactorSlot& operator=(const FactorSlot& other);
    FactorSlot(FactorSlot&&) noexcept;
    FactorSlot& operator=(FactorSlot&&) noexcept;
    ~FactorSlot();
    BasisFactor* operator->() const { return ptr_.get(); }

   private:
    std::unique_ptr<BasisFactor> ptr_;
  };
  FactorSlot factor_;
  std::function<bool()> interrupt_;
  LpStatus status_ = LpStatus::Infeasible;
  bool dirty_ = true;
  bool stale_ = true;  // factor_ does not match head_
  long iterations_ = 0;
  long iteration_limit_ = 2'000'000;  // per solve() call
  long solve_start_ = 0;
};

/// Solves the LP relaxation of `model`. With `ignore_integrality` false the
/// model must not contain integer variables (use solve_mio for those).
LpSolution solve_lp(const LinearModel& model, bool ignore_integrality = true);

}  // namespace strongtree
