#include "strongtree/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "basis_factor.hpp"
#include "strongtree/error.hpp"

namespace strongtree {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Interrupted: return "interrupted";
  }
  return "unknown";
}

namespace {

constexpr double kZero = 1e-12;
constexpr int kStallLimit = 50;
constexpr int kRefactorEvery = 64;
constexpr long kPollEvery = 32;

inline void clean(double& v) {
  if (std::abs(v) < kZero) v = 0.0;
}

}  // namespace

SimplexEngine::FactorSlot::FactorSlot() : ptr_(std::make_unique<BasisFactor>()) {}
SimplexEngine::FactorSlot::FactorSlot(const FactorSlot& other) : ptr_(std::make_unique<BasisFactor>(*other.ptr_)) {}
SimplexEngine::FactorSlot& SimplexEngine::FactorSlot::operator=(const FactorSlot& other) {
  if (this != &other) ptr_ = std::make_unique<BasisFactor>(*other.ptr_);
  return *this;
}
SimplexEngine::FactorSlot::FactorSlot(FactorSlot&&) noexcept = default;
SimplexEngine::FactorSlot& SimplexEngine::FactorSlot::operator=(FactorSlot&&) noexcept = default;
SimplexEngine::FactorSlot::~FactorSlot() = default;

SimplexEngine::SimplexEngine(const LinearModel& model, LpTolerances tol) : tol_(tol) {
  n_ = model.num_variables();
  cols_.resize(n_);
  for (const Variable& v : model.variables()) {
    cost_.push_back(v.objective);
    lo_.push_back(v.lower);
    hi_.push_back(v.upper);
  }
  x_.assign(n_, 0.0);
  stat_.assign(n_, VarStatus::AtLower);
  d_.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  for (const Constraint& c : model.constraints()) add_row(c);
  dirty_ = true;
  stale_ = true;
}

void SimplexEngine::place_nonbasic(int j) {
  if (stat_[j] == VarStatus::AtUpper && std::isfinite(hi_[j])) {
    x_[j] = hi_[j];
  } else if (std::isfinite(lo_[j])) {
    stat_[j] = VarStatus::AtLower;
    x_[j] = lo_[j];
  } else if (std::isfinite(hi_[j])) {
    stat_[j] = VarStatus::AtUpper;
    x_[j] = hi_[j];
  } else {
    stat_[j] = VarStatus::Free;
    x_[j] = 0.0;
  }
}

void SimplexEngine::set_bounds(int j, double lower, double upper) {
  if (j < 0 || j >= n_ || lower > upper) {
    throw Error(ErrorCode::InvalidArgument, "bad bound change on column " + std::to_string(j));
  }
  lo_[j] = lower;
  hi_[j] = upper;
  if (stat_[j] != VarStatus::Basic) place_nonbasic(j);
  dirty_ = true;
}

int SimplexEngine::add_row(const Constraint& row) {
  SparseRow sr;
  const int r = num_rows();
  for (const Term& t : row.terms) {
    if (t.var < 0 || t.var >= n_) {
      throw Error(ErrorCode::InvalidArgument, "row references unknown column");
    }
    sr.idx.push_back(t.var);
    sr.val.push_back(t.coef);
  }
  sr.rhs = row.rhs;
  double activity = 0.0;
  for (std::size_t k = 0; k < sr.idx.size(); ++k) {
    cols_[sr.idx[k]].emplace_back(r, sr.val[k]);
    activity += sr.val[k] * x_[sr.idx[k]];
  }
  rows_.push_back(std::move(sr));

  switch (row.relation) {
    case Relation::LessEqual: lo_.push_back(0.0); hi_.push_back(kInfinity); break;
    case Relation::GreaterEqual: lo_.push_back(-kInfinity); hi_.push_back(0.0); break;
    case Relation::Equal: lo_.push_back(0.0); hi_.push_back(0.0); break;
  }
  cost_.push_back(0.0);
  x_.push_back(row.rhs - activity);
  stat_.push_back(VarStatus::Basic);
  d_.push_back(0.0);
  head_.push_back(n_ + r);
  weight_.push_back(1.0);
  stale_ = true;
  return r;
}

void SimplexEngine::column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j < n_) {
    for (const auto& [r, v] : cols_[j]) dense[r] += v;
  } else {
    dense[j - n_] = 1.0;
  }
}

void SimplexEngine::pivot_row(const std::vector<double>& rho, std::vector<double>& out) const {
  out.assign(width(), 0.0);
  for (int r = 0; r < num_rows(); ++r) {
    const double y = rho[r];
    if (y == 0.0) continue;
    const SparseRow& row = rows_[r];
    for (std::size_t k = 0; k < row.idx.size(); ++k) out[row.idx[k]] += row.val[k] * y;
    out[n_ + r] = y;
  }
  for (double& v : out) clean(v);
}

void SimplexEngine::refactor() {
  const int m = num_rows();
  std::vector<BasisFactor::Column> columns(m);
  for (int attempt = 0;; ++attempt) {
    for (int p = 0; p < m; ++p) {
      const int j = head_[p];
      if (j < n_) {
        columns[p] = cols_[j];
      } else {
        columns[p] = {{j - n_, 1.0}};
      }
    }
    const BasisFactor::Deficiency def = factor_->factorize(m, columns);
    if (def.positions.empty()) break;
    if (attempt > 2 || def.positions.size() != def.rows.size()) {
      throw Error(ErrorCode::NumericalBreakdown, "basis matrix could not be repaired");
    }
    // swap dependent columns for the slacks of the uncovered rows
    for (std::size_t k = 0; k < def.positions.size(); ++k) {
      const int p = def.positions[k];
      const int old = head_[p];
      head_[p] = n_ + def.rows[k];
      stat_[n_ + def.rows[k]] = VarStatus::Basic;
      stat_[old] = VarStatus::AtLower;
      place_nonbasic(old);
    }
  }
  stale_ = false;
  recompute_basic_values();
  recompute_reduced_costs();
  dirty_ = false;
}

void SimplexEngine::recompute_basic_values() {
  const int m = num_rows();
  std::vector<double> b(m);
  for (int r = 0; r < m; ++r) b[r] = rows_[r].rhs;
  for (int j = 0; j < width(); ++j) {
    if (stat_[j] == VarStatus::Basic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (const auto& [r, v] : cols_[j]) b[r] -= v * x_[j];
    } else {
      b[j - n_] -= x_[j];
    }
  }
  factor_->ftran(b);
  for (int p = 0; p < m; ++p) x_[head_[p]] = b[p];
}

void SimplexEngine::recompute_reduced_costs() {
  const int m = num_rows();
  std::vector<double> y(m);
  for (int p = 0; p < m; ++p) y[p] = cost_[head_[p]];
  factor_->btran(y);
  d_ = cost_;
  for (int j = 0; j < n_; ++j) {
    for (const auto& [r, v] : cols_[j]) d_[j] -= v * y[r];
  }
  for (int r = 0; r < m; ++r) d_[n_ + r] = -y[r];
  for (int p = 0; p < m; ++p) d_[head_[p]] = 0.0;
  for (double& v : d_) clean(v);
}

void SimplexEngine::exchange(int r, int q, const std::vector<double>& alpha, const std::vector<double>& rho) {
  // steepest-edge weights of the new basis
  std::vector<double> tau = rho;
  factor_->ftran(tau);
  const double ar = alpha[r];
  const double wr = weight_[r];
  for (int i = 0; i < num_rows(); ++i) {
    if (i == r || alpha[i] == 0.0) continue;
    const double ratio = alpha[i] / ar;
    weight_[i] = std::max(weight_[i] + ratio * (ratio * wr - 2.0 * tau[i]), 1e-4);
  }
  weight_[r] = std::max(wr / (ar * ar), 1e-4);
  bool sane = true;
  for (double w : weight_) sane = sane && w < 1e8;
  if (!sane) std::fill(weight_.begin(), weight_.end(), 1.0);  // restart the reference framework
  factor_->update(r, alpha);
  head_[r] = q;
  stat_[q] = VarStatus::Basic;
  if (factor_->updates() >= kRefactorEvery) refactor();
}

double SimplexEngine::infeasibility(int j) const {
  return std::max({0.0, lo_[j] - x_[j], x_[j] - hi_[j]});
}

bool SimplexEngine::primal_feasible() const {
  for (int r = 0; r < num_rows(); ++r) {
    if (infeasibility(head_[r]) > tol_.feasibility) return false;
  }
  return true;
}

bool SimplexEngine::dual_feasible() const {
  for (int j = 0; j < width(); ++j) {
    switch (stat_[j]) {
      case VarStatus::Basic: break;
      case VarStatus::AtLower:
        if (hi_[j] > lo_[j] && d_[j] > tol_.optimality) return false;
        break;
      case VarStatus::AtUpper:
        if (hi_[j] > lo_[j] && d_[j] < -tol_.optimality) return false;
        break;
      case VarStatus::Free:
        if (std::abs(d_[j]) > tol_.optimality) return false;
        break;
    }
  }
  return true;
}

void SimplexEngine::count_iteration() {
  ++iterations_;
  if (iterations_ - solve_start_ > iteration_limit_) {
    throw Error(ErrorCode::NumericalBreakdown,
                "simplex exceeded " + std::to_string(iteration_limit_) + " iterations (" +
                    std::to_string(num_rows()) + " rows, " + std::to_string(width()) +
                    " columns)");
  }
  if (interrupt_ && iterations_ % kPollEvery == 0 && interrupt_()) throw Interrupted{};
}

// Returns after setting status_: Optimal (phase two done, or phase one reached
// feasibility), Infeasible (phase one stuck) or Unbounded.
bool SimplexEngine::primal_simplex(bool phase_one) {
  const int m = num_rows();
  const int w = width();
  std::vector<double> phase_costs;
  std::vector<double> alpha(m), rho(m), prow;
  int degenerate = 0;
  if (!phase_one) recompute_reduced_costs();
  for (;;) {
    const std::vector<double>* d = &d_;
    if (phase_one) {
      std::fill(rho.begin(), rho.end(), 0.0);
      bool any = false;
      for (int r = 0; r < m; ++r) {
        const int j = head_[r];
        if (x_[j] < lo_[j] - tol_.feasibility) rho[r] = 1.0;
        else if (x_[j] > hi_[j] + tol_.feasibility) rho[r] = -1.0;
        any = any || rho[r] != 0.0;
      }
      if (!any) {
        status_ = LpStatus::Optimal;
        return true;
      }
      factor_->btran(rho);
      pivot_row(rho, phase_costs);
      for (double& v : phase_costs) v = -v;
      for (int r = 0; r < m; ++r) phase_costs[head_[r]] = 0.0;
      d = &phase_costs;
    }

    const bool bland = degenerate > kStallLimit;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < w; ++j) {
      const VarStatus s = stat_[j];
      if (s == VarStatus::Basic || hi_[j] - lo_[j] <= 0.0) continue;
      const double dj = (*d)[j];
      const bool improving = (s == VarStatus::AtLower && dj > tol_.optimality) ||
                             (s == VarStatus::AtUpper && dj < -tol_.optimality) ||
                             (s == VarStatus::Free && std::abs(dj) > tol_.optimality);
      if (!improving) continue;
      if (bland) {
        q = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
      }
    }
    if (q < 0) {
      status_ = phase_one ? LpStatus::Infeasible : LpStatus::Optimal;
      return true;
    }
    const double dir = (*d)[q] > 0.0 ? 1.0 : -1.0;
    const double flip = hi_[q] - lo_[q];
    column(q, alpha);
    factor_->ftran(alpha);
    for (double& v : alpha) clean(v);

    // ratio test: for each row the relaxed and exact step and the bound it hits
    struct Limit {
      int row;
      double exact;
      double relaxed;
      bool to_upper;
    };
    std::vector<Limit> limits;
    for (int r = 0; r < m; ++r) {
      const double a = alpha[r] * dir;  // basic moves by -a * theta
      if (std::abs(a) <= tol_.pivot) continue;
      const int j = head_[r];
      const double xv = x_[j];
      const double ft = tol_.feasibility;
      if (a > 0.0) {
        if (xv < lo_[j] - ft) continue;
        if (xv > hi_[j] + ft) {
          limits.push_back({r, (xv - hi_[j]) / a, (xv - hi_[j] + ft) / a, true});
        } else if (std::isfinite(lo_[j])) {
          limits.push_back({r, std::max(0.0, xv - lo_[j]) / a, (xv - lo_[j] + ft) / a, false});
        }
      } else {
        const double b = -a;
        if (xv > hi_[j] + ft) continue;
        if (xv < lo_[j] - ft) {
          limits.push_back({r, (lo_[j] - xv) / b, (lo_[j] - xv + ft) / b, false});
        } else if (std::isfinite(hi_[j])) {
          limits.push_back({r, std::max(0.0, hi_[j] - xv) / b, (hi_[j] - xv + ft) / b, true});
        }
      }
    }
    int chosen = -1;
    if (!limits.empty()) {
      if (bland) {
        for (std::size_t k = 0; k < limits.size(); ++k) {
          const Limit& l = limits[k];
          if (chosen < 0 || l.exact < limits[chosen].exact - kZero ||
              (std::abs(l.exact - limits[chosen].exact) <= kZero &&
               head_[l.row] < head_[limits[chosen].row])) {
            chosen = static_cast<int>(k);
          }
        }
      } else {
        double bound = kInfinity;
        for (const Limit& l : limits) bound = std::min(bound, l.relaxed);
        double best_pivot = -1.0;
        for (std::size_t k = 0; k < limits.size(); ++k) {
          const Limit& l = limits[k];
          if (l.exact > bound) continue;
          const double mag = std::abs(alpha[l.row]);
          if (mag > best_pivot) {
            best_pivot = mag;
            chosen = static_cast<int>(k);
          }
        }
      }
    }
    count_iteration();
    const double row_step = chosen >= 0 ? limits[chosen].exact : kInfinity;
    if (std::isfinite(flip) && flip <= row_step) {
      const double delta = dir * flip;
      for (int r = 0; r < m; ++r) {
        if (alpha[r] != 0.0) x_[head_[r]] -= alpha[r] * delta;
      }
      stat_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      degenerate = 0;
      continue;
    }
    if (chosen < 0) {
      if (phase_one) {
        throw Error(ErrorCode::NumericalBreakdown, "phase one ray without a blocking row");
      }
      status_ = LpStatus::Unbounded;
      return true;
    }
    const Limit lim = limits[chosen];
    const double delta = dir * lim.exact;
    if (delta != 0.0) {
      for (int r = 0; r < m; ++r) {
        if (alpha[r] != 0.0) x_[head_[r]] -= alpha[r] * delta;
      }
      x_[q] += delta;
    }
    const int leaving = head_[lim.row];
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[lim.row] = 1.0;
    factor_->btran(rho);
    if (!phase_one) {
      pivot_row(rho, prow);
      const double theta = d_[q] / alpha[lim.row];
      for (int j = 0; j < w; ++j) {
        if (prow[j] != 0.0 && stat_[j] != VarStatus::Basic) {
          d_[j] -= theta * prow[j];
          clean(d_[j]);
        }
      }
      d_[leaving] = -theta;
      d_[q] = 0.0;
    }
    x_[leaving] = lim.to_upper ? hi_[leaving] : lo_[leaving];
    stat_[leaving] = lim.to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
    exchange(lim.row, q, alpha, rho);
    degenerate = lim.exact <= kZero ? degenerate + 1 : 0;
  }
}

// Dual simplex on costs nudged away from zero reduced cost, which breaks the
// heavy dual degeneracy of flow models. Original costs are back on return.
bool SimplexEngine::perturbed_dual(long budget) {
  const std::vector<double> saved = cost_;
  for (int j = 0; j < n_; ++j) {
    if (stat_[j] == VarStatus::Basic || stat_[j] == VarStatus::Free || hi_[j] <= lo_[j]) continue;
    const double u = static_cast<double>((static_cast<std::uint64_t>(j) * 2654435761u) % 1024) / 1024.0;
    const double eps = 1e-3 * (1.0 + std::abs(cost_[j])) * (1.0 + u);
    const double shift = stat_[j] == VarStatus::AtLower ? -eps : eps;
    cost_[j] += shift;
    d_[j] += shift;
  }
  bool settled = false;
  try {
    settled = dual_simplex(budget);
  } catch (...) {
    cost_ = saved;
    dirty_ = true;
    throw;
  }
  cost_ = saved;
  recompute_reduced_costs();
  return settled;
}

// Returns false when the iteration budget runs out before a verdict.
bool SimplexEngine::dual_simplex(long budget) {
  const int m = num_rows();
  const int w = width();
  std::vector<double> alpha(m), rho(m), flip(m), tr;
  std::vector<std::pair<double, int>> cand;
  for (long it = 0;; ++it) {
    if (it >= budget) return false;
    int r = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      const double inf = infeasibility(head_[i]);
      if (inf <= tol_.feasibility) continue;
      const double score = inf * inf / weight_[i];
      if (score > worst) {
        worst = score;
        r = i;
      }
    }
    if (r < 0) {
      status_ = LpStatus::Optimal;
      return true;
    }
    const int p = head_[r];
    const bool up = x_[p] < lo_[p];
    const double target = up ? lo_[p] : hi_[p];
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    factor_->btran(rho);
    pivot_row(rho, tr);

    // breakpoints of the dual step; boxed candidates may be flipped to their
    // other bound while the leaving row stays infeasible
    cand.clear();
    for (int j = 0; j < w; ++j) {
      const VarStatus s = stat_[j];
      if (s == VarStatus::Basic || hi_[j] - lo_[j] <= 0.0) continue;
      const double t = tr[j];
      if (std::abs(t) <= tol_.pivot) continue;
      const double move = (up ? 1.0 : -1.0) * (t > 0.0 ? -1.0 : 1.0);
      const bool ok = s == VarStatus::Free || (s == VarStatus::AtLower && move > 0.0) ||
                      (s == VarStatus::AtUpper && move < 0.0);
      if (ok) cand.emplace_back(std::abs(d_[j]) / std::abs(t), j);
    }
    if (cand.empty()) {
      status_ = LpStatus::Infeasible;
      return true;
    }
    std::sort(cand.begin(), cand.end());
    double slope = std::abs(x_[p] - target);
    std::size_t first = 0;
    for (; first < cand.size(); ++first) {
      const int j = cand[first].second;
      const double range = hi_[j] - lo_[j];
      if (!std::isfinite(range)) break;
      const double drop = std::abs(tr[j]) * range;
      if (slope - drop <= tol_.feasibility) break;
      slope -= drop;
    }
    if (first == cand.size()) {
      status_ = LpStatus::Infeasible;
      return true;
    }
    double bound = kInfinity;
    for (std::size_t k = first; k < cand.size(); ++k) {
      const int j = cand[k].second;
      bound = std::min(bound, (std::abs(d_[j]) + tol_.optimality) / std::abs(tr[j]));
    }
    int q = -1;
    double best_pivot = -1.0;
    for (std::size_t k = first; k < cand.size() && cand[k].first <= bound; ++k) {
      const int j = cand[k].second;
      if (std::abs(tr[j]) > best_pivot) {
        best_pivot = std::abs(tr[j]);
        q = j;
      }
    }
    if (first > 0) {
      // move the passed breakpoints to their other bound
      std::fill(flip.begin(), flip.end(), 0.0);
      for (std::size_t k = 0; k < first; ++k) {
        const int j = cand[k].second;
        const bool to_upper = stat_[j] == VarStatus::AtLower;
        const double step = to_upper ? hi_[j] - lo_[j] : lo_[j] - hi_[j];
        x_[j] = to_upper ? hi_[j] : lo_[j];
        stat_[j] = to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        if (j < n_) {
          for (const auto& [row, v] : cols_[j]) flip[row] += v * step;
        } else {
          flip[j - n_] += step;
        }
      }
      factor_->ftran(flip);
      for (int i = 0; i < m; ++i) {
        if (flip[i] != 0.0) x_[head_[i]] -= flip[i];
      }
    }
    count_iteration();
    column(q, alpha);
    factor_->ftran(alpha);
    for (double& v : alpha) clean(v);
    if (std::abs(alpha[r] - tr[q]) > 1e-7 * (1.0 + std::abs(tr[q]))) {
      // row and column disagree on the pivot; start over from fresh factors
      refactor();
      continue;
    }
    const double delta = (target - x_[p]) / (-alpha[r]);
    for (int i = 0; i < m; ++i) {
      if (alpha[i] != 0.0) x_[head_[i]] -= alpha[i] * delta;
    }
    x_[q] += delta;
    x_[p] = target;
    const double theta = d_[q] / tr[q];
    for (int j = 0; j < w; ++j) {
      if (tr[j] != 0.0 && stat_[j] != VarStatus::Basic) {
        d_[j] -= theta * tr[j];
        clean(d_[j]);
      }
    }
    d_[p] = -theta;
    d_[q] = 0.0;
    stat_[p] = up ? VarStatus::AtLower : VarStatus::AtUpper;
    exchange(r, q, alpha, rho);
  }
}

double SimplexEngine::original_violation() const {
  double worst = 0.0;
  for (int j = 0; j < n_; ++j) worst = std::max(worst, infeasibility(j));
  for (int r = 0; r < num_rows(); ++r) {
    const SparseRow& row = rows_[r];
    double act = x_[n_ + r];
    for (std::size_t k = 0; k < row.idx.size(); ++k) act += row.val[k] * x_[row.idx[k]];
    worst = std::max({worst, std::abs(act - row.rhs), infeasibility(n_ + r)});
  }
  return worst;
}

LpStatus SimplexEngine::solve() {
  solve_start_ = iterations_;
  try {
    if (stale_) refactor();
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (attempt > 0) {
        refactor();
      } else if (dirty_) {
        recompute_basic_values();
        recompute_reduced_costs();
        dirty_ = false;
      }
      if (!primal_feasible()) {
        bool settled = false;
        if (dual_feasible()) {
          settled = perturbed_dual(20L * (num_rows() + width()));
          // a dual ray is confirmed by phase one below before reporting it
          if (settled && status_ == LpStatus::Infeasible) settled = false;
        }
        if (!settled) {
          primal_simplex(true);
          if (status_ == LpStatus::Infeasible) return status_;
        }
      }
      primal_simplex(false);
      if (status_ == LpStatus::Unbounded) return status_;
      recompute_basic_values();
      if (primal_feasible() && original_violation() <= 1e-6) return status_;
    }
  } catch (const Interrupted&) {
    status_ = LpStatus::Interrupted;
    dirty_ = true;
    return status_;
  }
  throw Error(ErrorCode::NumericalBreakdown,
              "simplex could not reach a feasible basis after refactorization");
}

double SimplexEngine::objective() const {
  double v = 0.0;
  for (int j = 0; j < n_; ++j) v += cost_[j] * x_[j];
  return v;
}

std::vector<double> SimplexEngine::primal() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

std::vector<double> SimplexEngine::duals() const {
  std::vector<double> y(num_rows());
  for (int r = 0; r < num_rows(); ++r) y[r] = -d_[n_ + r];
  return y;
}

SimplexEngine::Basis SimplexEngine::basis() const { return Basis{head_, stat_, weight_}; }

void SimplexEngine::restore(const Basis& saved) {
  const int w = width();
  if (saved.basic.size() > static_cast<std::size_t>(num_rows()) || saved.status.size() > static_cast<std::size_t>(w)) {
    throw Error(ErrorCode::InvalidArgument, "basis does not fit this model");
  }
  head_ = saved.basic;
  for (int r = static_cast<int>(saved.basic.size()); r < num_rows(); ++r) head_.push_back(n_ + r);
  weight_.assign(num_rows(), 1.0);
  if (saved.weights.size() == saved.basic.size()) std::copy(saved.weights.begin(), saved.weights.end(), weight_.begin());
  std::vector<char> basic(w, 0);
  for (int j : head_) {
    if (j < 0 || j >= w || basic[j]) throw Error(ErrorCode::InvalidArgument, "basis repeats a column");
    basic[j] = 1;
  }
  for (int j = 0; j < w; ++j) {
    if (basic[j]) {
      stat_[j] = VarStatus::Basic;
      continue;
    }
    const bool known = j < static_cast<int>(saved.status.size()) && saved.status[j] != VarStatus::Basic;
    stat_[j] = known ? saved.status[j] : VarStatus::AtLower;
    place_nonbasic(j);
  }
  stale_ = true;
  dirty_ = true;
}

LpSolution solve_lp(const LinearModel& model, bool ignore_integrality) {
  if (!ignore_integrality && model.num_integer_variables() > 0) {
    throw Error(ErrorCode::InvalidArgument,
                "model has integer variables; solve it with solve_mio or ignore integrality");
  }
  SimplexEngine engine(model);
  LpSolution out;
  out.status = engine.solve();
  out.iterations = engine.iterations();
  if (out.status == LpStatus::Optimal) {
    out.values = engine.primal();
    out.objective = engine.objective() + model.objective_offset;
    out.duals = engine.duals();
  }
  return out;
}

}  // namespace strongtree
