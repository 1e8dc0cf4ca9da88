#include "skytrack/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skytrack/error.hpp"

namespace skytrack {

namespace {

// Shortest augmenting path with row/column potentials, rows <= cols.
// Indices are 1-based internally; column 0 is the virtual source.
std::vector<AssignedPair> solve_wide(const CostMatrix& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<int> owner(m + 1, 0);  // row matched to each column
  std::vector<int> way(m + 1, 0);
  std::vector<double> min_slack(m + 1);
  std::vector<char> used(m + 1);

  for (int row = 1; row <= n; ++row) {
    owner[0] = row;
    int col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const int row0 = owner[col0];
      double delta = kInf;
      int col1 = 0;
      for (int col = 1; col <= m; ++col) {
        if (used[col]) continue;
        const double slack = a(row0 - 1, col - 1) - u[row0] - v[col];
        if (slack < min_slack[col]) {
          min_slack[col] = slack;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= m; ++col) {
        if (used[col]) {
          u[owner[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const int col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<AssignedPair> pairs;
  pairs.reserve(n);
  for (int col = 1; col <= m; ++col) {
    if (owner[col] != 0) pairs.emplace_back(owner[col] - 1, col - 1);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace

std::vector<AssignedPair> hungarian_min_cost(const CostMatrix& cost) {
  if (!cost.allFinite()) throw InvalidArgument("invalid cost matrix: non-finite entry");
  if (cost.rows() == 0 || cost.cols() == 0) return {};
  if (cost.rows() <= cost.cols()) return solve_wide(cost);

  const CostMatrix transposed = cost.transpose();
  std::vector<AssignedPair> pairs = solve_wide(transposed);
  for (auto& [r, c] : pairs) std::swap(r, c);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

double assignment_cost(const CostMatrix& cost, const std::vector<AssignedPair>& pairs) {
  double total = 0.0;
  for (const auto& [r, c] : pairs) total += cost(r, c);
  return total;
}

}  // namespace skytrack
