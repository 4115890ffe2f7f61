#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace linar {

struct Assignment {
  std::vector<int> col_of_row;  // column assigned to each row
  double cost = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Shortest augmenting path with potentials, O(rows^2 * cols).
inline Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const std::size_t m = cost[0].size();
  if (m < n) throw std::domain_error("solve_assignment: more rows than columns");
  for (const auto& row : cost)
    if (row.size() != m) throw std::domain_error("solve_assignment: ragged cost matrix");

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based; column 0 is the virtual root of each augmentation
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment a;
  a.col_of_row.assign(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) a.col_of_row[p[j] - 1] = static_cast<int>(j - 1);
  for (std::size_t i = 0; i < n; ++i) a.cost += cost[i][static_cast<std::size_t>(a.col_of_row[i])];
  return a;
}

}  // namespace linar
