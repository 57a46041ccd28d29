#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>

namespace strongtree {

namespace {

constexpr double kDrop = 1e-14;
constexpr double kSingular = 1e-11;

}  // namespace

BasisFactor::Deficiency BasisFactor::factorize(int m, const std::vector<Column>& columns) {
  m_ = m;
  pivots_.clear();
  u_.clear();
  l_.clear();
  etas_.clear();
  work_.assign(m, 0.0);

  std::vector<Column> rows(m);
  for (int p = 0; p < m; ++p) {
    for (const auto& [r, v] : columns[p]) {
      if (v != 0.0) rows[r].emplace_back(p, v);
    }
  }
  std::vector<char> row_live(m, 1), col_live(m, 1);
  std::vector<int> row_count(m, 0), col_count(m, 0);
  for (int r = 0; r < m; ++r) row_count[r] = static_cast<int>(rows[r].size());
  for (int p = 0; p < m; ++p) {
    for (const auto& e : columns[p]) col_count[p] += e.second != 0.0 ? 1 : 0;
  }

  std::vector<int> col_queue, row_queue;
  for (int p = 0; p < m; ++p) {
    if (col_count[p] == 1) col_queue.push_back(p);
  }
  for (int r = 0; r < m; ++r) {
    if (row_count[r] == 1) row_queue.push_back(r);
  }

  auto drop_row = [&](int r) {
    row_live[r] = 0;
    for (const auto& [p, v] : rows[r]) {
      if (!col_live[p]) continue;
      if (--col_count[p] == 1) col_queue.push_back(p);
    }
  };
  auto drop_col = [&](int p) {
    col_live[p] = 0;
    for (const auto& [r, v] : columns[p]) {
      if (!row_live[r] || v == 0.0) continue;
      if (--row_count[r] == 1) row_queue.push_back(r);
    }
  };

  bool progress = true;
  while (progress) {
    progress = false;
    while (!col_queue.empty()) {
      const int p = col_queue.back();
      col_queue.pop_back();
      if (!col_live[p] || col_count[p] != 1) continue;
      int r = -1;
      double v = 0.0;
      for (const auto& [i, a] : columns[p]) {
        if (row_live[i] && a != 0.0) {
          r = i;
          v = a;
        }
      }
      if (std::abs(v) < kSingular) continue;  // left for the nucleus
      Pivot pv{r, p, v, static_cast<int>(u_.size()), 0, static_cast<int>(l_.size()), static_cast<int>(l_.size())};
      for (const auto& [q, a] : rows[r]) {
        if (q != p && col_live[q]) u_.emplace_back(q, a);
      }
      pv.u_end = static_cast<int>(u_.size());
      pivots_.push_back(pv);
      col_live[p] = 0;
      drop_row(r);
      progress = true;
    }
    while (!row_queue.empty()) {
      const int r = row_queue.back();
      row_queue.pop_back();
      if (!row_live[r] || row_count[r] != 1) continue;
      int p = -1;
      double v = 0.0;
      for (const auto& [q, a] : rows[r]) {
        if (col_live[q]) {
          p = q;
          v = a;
        }
      }
      if (std::abs(v) < kSingular) continue;
      Pivot pv{r, p, v, static_cast<int>(u_.size()), static_cast<int>(u_.size()), static_cast<int>(l_.size()), 0};
      for (const auto& [i, a] : columns[p]) {
        if (i != r && row_live[i] && a != 0.0) l_.emplace_back(i, a / v);
      }
      pv.l_end = static_cast<int>(l_.size());
      pivots_.push_back(pv);
      row_live[r] = 0;
      drop_col(p);
      progress = true;
      if (!col_queue.empty()) break;
    }
  }

  // dense nucleus
  std::vector<int> nr, nc;
  for (int r = 0; r < m; ++r) {
    if (row_live[r]) nr.push_back(r);
  }
  for (int p = 0; p < m; ++p) {
    if (col_live[p]) nc.push_back(p);
  }
  Deficiency out;
  if (!nr.empty() || !nc.empty()) {
    const int R = static_cast<int>(nr.size());
    const int C = static_cast<int>(nc.size());
    std::vector<int> row_slot(m, -1);
    for (int i = 0; i < R; ++i) row_slot[nr[i]] = i;
    std::vector<double> dense(static_cast<std::size_t>(R) * C, 0.0);
    for (int c = 0; c < C; ++c) {
      for (const auto& [r, a] : columns[nc[c]]) {
        if (row_slot[r] >= 0) dense[static_cast<std::size_t>(row_slot[r]) * C + c] += a;
      }
    }
    // sparser columns first
    std::vector<int> order(C);
    for (int c = 0; c < C; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return col_count[nc[a]] < col_count[nc[b]]; });
    std::vector<char> row_done(R, 0), col_done(C, 0);
    for (int c : order) {
      int best = -1;
      double mag = kSingular;
      for (int i = 0; i < R; ++i) {
        if (row_done[i]) continue;
        const double a = std::abs(dense[static_cast<std::size_t>(i) * C + c]);
        if (a > mag) {
          mag = a;
          best = i;
        }
      }
      if (best < 0) {
        out.positions.push_back(nc[c]);
        continue;
      }
      const double piv = dense[static_cast<std::size_t>(best) * C + c];
      row_done[best] = 1;
      col_done[c] = 1;
      Pivot pv{nr[best], nc[c], piv, static_cast<int>(u_.size()), 0, static_cast<int>(l_.size()), 0};
      const double* prow = &dense[static_cast<std::size_t>(best) * C];
      for (int k = 0; k < C; ++k) {
        if (!col_done[k] && std::abs(prow[k]) > kDrop) u_.emplace_back(nc[k], prow[k]);
      }
      pv.u_end = static_cast<int>(u_.size());
      for (int i = 0; i < R; ++i) {
        if (row_done[i]) continue;
        double* irow = &dense[static_cast<std::size_t>(i) * C];
        if (std::abs(irow[c]) <= kDrop) continue;
        const double f = irow[c] / piv;
        l_.emplace_back(nr[i], f);
        for (int k = 0; k < C; ++k) {
          if (!col_done[k] && prow[k] != 0.0) irow[k] -= f * prow[k];
        }
        irow[c] = 0.0;
      }
      pv.l_end = static_cast<int>(l_.size());
      pivots_.push_back(pv);
    }
    for (int i = 0; i < R; ++i) {
      if (!row_done[i]) out.rows.push_back(nr[i]);
    }
  }
  if (out.positions.empty()) index_transposes();
  return out;
}

void BasisFactor::index_transposes() {
  // U entry (pivot k, pos) is keyed by the pivot that owns pos; L entry
  // (pivot k, row i) is keyed by row i.
  std::vector<int> owner(m_, -1);
  for (std::size_t k = 0; k < pivots_.size(); ++k) owner[pivots_[k].pos] = static_cast<int>(k);
  ucol_start_.assign(m_ + 1, 0);
  lrow_start_.assign(m_ + 1, 0);
  for (const Pivot& pv : pivots_) {
    for (int k = pv.u_begin; k < pv.u_end; ++k) ++ucol_start_[owner[u_[k].first] + 1];
    for (int k = pv.l_begin; k < pv.l_end; ++k) ++lrow_start_[l_[k].first + 1];
  }
  for (int i = 0; i < m_; ++i) {
    ucol_start_[i + 1] += ucol_start_[i];
    lrow_start_[i + 1] += lrow_start_[i];
  }
  ucol_.resize(u_.size());
  lrow_.resize(l_.size());
  std::vector<int> ufill(ucol_start_.begin(), ucol_start_.end() - 1);
  std::vector<int> lfill(lrow_start_.begin(), lrow_start_.end() - 1);
  for (const Pivot& pv : pivots_) {
    for (int k = pv.u_begin; k < pv.u_end; ++k) ucol_[ufill[owner[u_[k].first]]++] = {pv.row, u_[k].second};
    for (int k = pv.l_begin; k < pv.l_end; ++k) lrow_[lfill[l_[k].first]++] = {pv.row, l_[k].second};
  }
}

void BasisFactor::ftran(std::vector<double>& a) const {
  for (const Pivot& pv : pivots_) {
    const double br = a[pv.row];
    if (br == 0.0) continue;
    for (int k = pv.l_begin; k < pv.l_end; ++k) a[l_[k].first] -= l_[k].second * br;
  }
  std::vector<double>& x = work_;
  for (int k = static_cast<int>(pivots_.size()) - 1; k >= 0; --k) {
    const Pivot& pv = pivots_[k];
    const double v = a[pv.row];
    if (v == 0.0) {
      x[pv.pos] = 0.0;
      continue;
    }
    const double xv = v / pv.value;
    x[pv.pos] = xv;
    for (int e = ucol_start_[k]; e < ucol_start_[k + 1]; ++e) a[ucol_[e].first] -= ucol_[e].second * xv;
  }
  a.swap(x);
  for (const Eta& e : etas_) {
    const double xp = a[e.pos] / e.pivot;
    a[e.pos] = xp;
    if (xp == 0.0) continue;
    for (const auto& [i, v] : e.others) a[i] -= v * xp;
  }
}

void BasisFactor::btran(std::vector<double>& e) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = e[it->pos];
    for (const auto& [i, v] : it->others) s -= v * e[i];
    e[it->pos] = s / it->pivot;
  }
  std::vector<double>& y = work_;
  for (const Pivot& pv : pivots_) {
    const double w = e[pv.pos] / pv.value;
    y[pv.row] = w;
    if (w == 0.0) continue;
    for (int k = pv.u_begin; k < pv.u_end; ++k) e[u_[k].first] -= u_[k].second * w;
  }
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    const double v = y[it->row];
    if (v == 0.0) continue;
    for (int k = lrow_start_[it->row]; k < lrow_start_[it->row + 1]; ++k) y[lrow_[k].first] -= lrow_[k].second * v;
  }
  e.swap(y);
}

void BasisFactor::update(int p, const std::vector<double>& alpha) {
  Eta e{p, alpha[p], {}};
  for (int i = 0; i < static_cast<int>(alpha.size()); ++i) {
    if (i != p && std::abs(alpha[i]) > kDrop) e.others.emplace_back(i, alpha[i]);
  }
  etas_.push_back(std::move(e));
}

}  // namespace strongtree
