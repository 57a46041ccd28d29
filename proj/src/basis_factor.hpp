#pragma once

#include <utility>
#include <vector>

namespace strongtree {

/// LU factors of a simplex basis with product-form updates.
/// Rows are constraint rows; columns are basis positions.
class BasisFactor {
 public:
  using Column = std::vector<std::pair<int, double>>;  // (row, value)

  struct Deficiency {
    std::vector<int> positions;  // positions left without a pivot
    std::vector<int> rows;       // rows left uncovered, same length
  };

  /// Factorizes the m x m matrix whose column p is columns[p]. Singleton rows
  /// and columns are peeled off first; the rest is factored densely with
  /// partial pivoting. A rank-deficient basis is reported, not thrown.
  Deficiency factorize(int m, const std::vector<Column>& columns);

  /// In place: rows -> positions.  Solves B x = a.
  void ftran(std::vector<double>& a) const;
  /// In place: positions -> rows.  Solves B^T y = e.
  void btran(std::vector<double>& e) const;

  /// Records that position p now holds the column whose ftran image is alpha.
  void update(int p, const std::vector<double>& alpha);
  int updates() const { return static_cast<int>(etas_.size()); }

 private:
  struct Pivot {
    int row;
    int pos;
    double value;
    int u_begin, u_end;  // entries (pos, value) of the eliminated row
    int l_begin, l_end;  // multipliers (row, value)
  };
  struct Eta {
    int pos;
    double pivot;
    std::vector<std::pair<int, double>> others;
  };

  void index_transposes();

  int m_ = 0;
  std::vector<Pivot> pivots_;
  std::vector<std::pair<int, double>> u_, l_;
  // same entries keyed the other way: U by column, L by row
  std::vector<int> ucol_start_, lrow_start_;
  std::vector<std::pair<int, double>> ucol_, lrow_;  // (row of earlier pivot, u) / (pivot row of column, m)
  std::vector<Eta> etas_;
  mutable std::vector<double> work_;
};

}  // namespace strongtree
