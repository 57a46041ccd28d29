#include "strongtree/linear_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>

#include "strongtree/error.hpp"

namespace strongtree {

double Constraint::activity(std::span<const double> x) const {
  double sum = 0.0;
  for (const Term& t : terms) sum += t.coef * x[t.var];
  return sum;
}

double Constraint::violation(std::span<const double> x) const {
  const double lhs = activity(x);
  switch (relation) {
    case Relation::LessEqual: return std::max(0.0, lhs - rhs);
    case Relation::GreaterEqual: return std::max(0.0, rhs - lhs);
    case Relation::Equal: return std::abs(lhs - rhs);
  }
  return 0.0;
}

int LinearModel::add_variable(std::string name, double lower, double upper, bool is_integer,
                              double objective) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw Error(ErrorCode::InvalidArgument, "variable '" + name + "' has lower > upper");
  }
  variables_.push_back(Variable{std::move(name), lower, upper, is_integer, objective});
  return num_variables() - 1;
}

void LinearModel::check_terms(const std::vector<Term>& terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw Error(ErrorCode::InvalidArgument,
                  "constraint references undeclared variable " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite constraint coefficient");
    }
  }
}

int LinearModel::add_constraint(Constraint constraint) {
  check_terms(constraint.terms);
  // merge duplicate references so every row has one coefficient per variable
  std::sort(constraint.terms.begin(), constraint.terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(constraint.terms.size());
  for (const Term& t : constraint.terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  constraint.terms = std::move(merged);
  constraints_.push_back(std::move(constraint));
  return num_constraints() - 1;
}

int LinearModel::add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                                std::string name) {
  return add_constraint(Constraint{std::move(terms), relation, rhs, std::move(name)});
}

void LinearModel::clear_objective() {
  for (Variable& v : variables_) v.objective = 0.0;
  objective_offset = 0.0;
  objective_granularity = 0.0;
}

void LinearModel::set_bounds(int j, double lower, double upper) {
  if (lower > upper) throw Error(ErrorCode::InvalidArgument, "lower > upper");
  Variable& v = variables_.at(j);
  v.lower = lower;
  v.upper = upper;
}

double LinearModel::objective_value(std::span<const double> x) const {
  double sum = objective_offset;
  for (int j = 0; j < num_variables(); ++j) sum += variables_[j].objective * x[j];
  return sum;
}

double LinearModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max({worst, variables_[j].lower - x[j], x[j] - variables_[j].upper});
  }
  for (const Constraint& c : constraints_) worst = std::max(worst, c.violation(x));
  return worst;
}

int LinearModel::num_integer_variables() const {
  return static_cast<int>(
      std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.is_integer; }));
}

namespace {

std::string lp_name(const std::string& raw, char prefix, int index) {
  if (raw.empty()) return std::string(1, prefix) + std::to_string(index);
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' ||
                    ch == '[' || ch == ']' || ch == '(' || ch == ')';
    out.push_back(ok ? ch : '_');
  }
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
    out.insert(out.begin(), prefix);
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  if (terms.empty()) {
    out << " 0 " << names.front();
    return;
  }
  for (const Term& t : terms) {
    out << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << names[t.var];
  }
}

}  // namespace

void LinearModel::write_lp(std::ostream& out) const {
  std::vector<std::string> names;
  names.reserve(variables_.size());
  for (int j = 0; j < num_variables(); ++j) names.push_back(lp_name(variables_[j].name, 'x', j));

  out.precision(17);
  out << "\\ objective offset " << objective_offset << "\n";
  out << "Maximize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].objective != 0.0) obj.push_back({j, variables_[j].objective});
  }
  if (num_variables() > 0) write_terms(out, obj, names);
  out << "\nSubject To\n";
  for (int r = 0; r < num_constraints(); ++r) {
    const Constraint& c = constraints_[r];
    out << ' ' << lp_name(c.name, 'c', r) << ':';
    write_terms(out, c.terms, names);
    switch (c.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::GreaterEqual: out << " >= "; break;
      case Relation::Equal: out << " = "; break;
    }
    out << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << ' ' << names[j] << " free\n";
      continue;
    }
    out << ' ';
    if (std::isinf(v.lower)) out << "-inf"; else out << v.lower;
    out << " <= " << names[j] << " <= ";
    if (std::isinf(v.upper)) out << "+inf"; else out << v.upper;
    out << '\n';
  }
  bool any_general = false;
  for (int j = 0; j < num_variables(); ++j) {
    if (!variables_[j].is_integer) continue;
    if (!any_general) out << "General\n";
    any_general = true;
    out << ' ' << names[j] << '\n';
  }
  out << "End\n";
}

void LinearModel::write_lp_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
  write_lp(out);
}

}  // namespace strongtree
