// Dense linear sum assignment (Hungarian method with potentials, O(n^3)).
#pragma once

#include "coroica/types.hpp"

#include <limits>
#include <vector>

namespace coroica {

/// Returns `col` such that row r is assigned to column col[r] and the total
/// cost is minimal. Ties resolve towards the lowest column index.
inline std::vector<Index> solve_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("solve_assignment: cost must be square");
  if (!cost.allFinite()) throw std::invalid_argument("solve_assignment: non-finite cost");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based bookkeeping; row 0 / column 0 are sentinels.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = match[j0];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> col(n, 0);
  for (Index j = 1; j <= n; ++j) col[match[j] - 1] = j - 1;
  return col;
}

}  // namespace coroica
