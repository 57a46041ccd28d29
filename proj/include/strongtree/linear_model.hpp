#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace strongtree {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;

  /// Activity of the left-hand side at `x`.
  double activity(std::span<const double> x) const;
  /// Positive amount by which `x` violates the constraint, 0 if satisfied.
  double violation(std::span<const double> x) const;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool is_integer = false;
  double objective = 0.0;
};

// Maximization model shared by every formulation and by the LP/MIO solvers.
class LinearModel {
 public:
  int add_variable(std::string name, double lower, double upper, bool is_integer,
                   double objective = 0.0);
  int add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, true, objective);
  }
  int add_constraint(Constraint constraint);
  int add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                     std::string name = {});

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  const Variable& variable(int j) const { return variables_.at(j); }
  Variable& variable(int j) { return variables_.at(j); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Constraint& constraint(int r) const { return constraints_.at(r); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  void set_objective_coefficient(int j, double c) { variables_.at(j).objective = c; }
  void clear_objective();
  void set_bounds(int j, double lower, double upper);

  /// Constant added to the objective of every solution.
  double objective_offset = 0.0;
  /// When positive, every integer-feasible solution has an objective value on
  /// the lattice offset + k * granularity; branch-and-bound prunes with it.
  double objective_granularity = 0.0;

  double objective_value(std::span<const double> x) const;
  /// Largest bound or constraint violation of `x`.
  double max_violation(std::span<const double> x) const;
  int num_integer_variables() const;

  /// Writes the model in the CPLEX LP text format.
  void write_lp(std::ostream& out) const;
  void write_lp_file(const std::string& path) const;

 private:
  void check_terms(const std::vector<Term>& terms) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
};

}  // namespace strongtree
