#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "corebench/errors.hpp"

namespace corebench {

using Rational = mpq_class;

/// Exact dense simplex for packing-form programs
///
///     maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
///
/// so the slack basis is feasible and no phase one is needed. Bland's rule
/// guarantees termination under degeneracy. `Field` must be an exact ordered
/// field (mpq_class by default); with exact arithmetic there are no tolerances.
template <typename Field = Rational>
class PackingSimplex {
 public:
  struct Solution {
    Field objective;
    std::vector<Field> x;
  };

  explicit PackingSimplex(std::size_t variables) : n_(variables), c_(variables, Field(0)) {}

  void set_objective(std::vector<Field> c) {
    if (c.size() != n_) throw InvalidInput("objective: dimension mismatch");
    c_ = std::move(c);
  }

  void add_row(std::vector<Field> a, Field b) {
    if (a.size() != n_) throw InvalidInput("constraint: dimension mismatch");
    if (b < 0) throw InvalidInput("constraint: packing form needs a non-negative bound");
    rows_.push_back(std::move(a));
    bounds_.push_back(std::move(b));
  }

  std::size_t row_count() const noexcept { return rows_.size(); }

  /// Optimal solution, or nullopt when the program is unbounded.
  std::optional<Solution> solve() const {
    const std::size_t m = rows_.size();
    const std::size_t cols = n_ + m;
    // Tableau rows 0..m-1 are constraints; row m is the objective (reduced costs).
    std::vector<std::vector<Field>> t(m + 1, std::vector<Field>(cols + 1, Field(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n_; ++j) t[i][j] = rows_[i][j];
      t[i][n_ + i] = 1;
      t[i][cols] = bounds_[i];
      basis[i] = n_ + i;
    }
    for (std::size_t j = 0; j < n_; ++j) t[m][j] = -c_[j];

    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        if (t[m][j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols) break;

      std::size_t leave = m;
      Field best_ratio;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        Field ratio = t[i][cols] / t[i][enter];
        if (leave == m || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == m) return std::nullopt;
      pivot(t, leave, enter);
      basis[leave] = enter;
    }

    Solution sol{t[m][cols], std::vector<Field>(n_, Field(0))};
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n_) sol.x[basis[i]] = t[i][cols];
    return sol;
  }

 private:
  static void pivot(std::vector<std::vector<Field>>& t, std::size_t r, std::size_t s) {
    const Field inv = Field(1) / t[r][s];
    for (auto& v : t[r]) v *= inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || t[i][s] == 0) continue;
      const Field f = t[i][s];
      for (std::size_t j = 0; j < t[i].size(); ++j) {
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
      }
    }
  }

  std::size_t n_;
  std::vector<Field> c_;
  std::vector<std::vector<Field>> rows_;
  std::vector<Field> bounds_;
};

}  // namespace corebench
