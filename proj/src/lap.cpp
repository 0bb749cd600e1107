#include "rectrack/lap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rectrack {

CostMatrix::CostMatrix(int n, int m) : rows(n), cols(m), c(static_cast<std::size_t>(n) * m, 0.0) {}

CostMatrix::CostMatrix(int n, int m, std::initializer_list<double> values) : CostMatrix(n, m) {
  if (values.size() != c.size()) throw std::invalid_argument("CostMatrix: initializer size mismatch");
  std::copy(values.begin(), values.end(), c.begin());
}

void CostMatrix::validate() const {
  for (double v : c)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("CostMatrix: entries must be finite and nonnegative");
}

namespace {

void validate_miss(const CostMatrix& c, const std::vector<double>& miss) {
  if (static_cast<int>(miss.size()) != c.rows)
    throw std::invalid_argument("solve_lap: miss cost count must equal rows");
  for (double v : miss)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("solve_lap: miss costs must be finite and nonnegative");
}

// Deterministic total: selected entries summed in row order.
double assignment_cost(const CostMatrix& c, const std::vector<double>& miss,
                       const std::vector<int>& col_of_row) {
  double total = 0.0;
  for (int i = 0; i < c.rows; ++i)
    total += col_of_row[i] == kMiss ? miss[i] : c.at(i, col_of_row[i]);
  return total;
}

}  // namespace

Assignment solve_lap(const CostMatrix& c, double miss_cost) {
  return solve_lap(c, std::vector<double>(c.rows, miss_cost));
}

// Shortest-augmenting-path (Jonker-Volgenant style) on the n x (m + n) matrix
// where column m + i is row i's private miss option; a large finite sentinel
// blocks every other row from a foreign miss column, and since each row always
// has its own affordable miss column the sentinel is never part of an optimum.
Assignment solve_lap(const CostMatrix& c, const std::vector<double>& miss_costs) {
  c.validate();
  validate_miss(c, miss_costs);
  const int n = c.rows;
  const int m = c.cols;
  Assignment result;
  result.col_of_row.assign(n, kMiss);
  if (n == 0) return result;

  double max_cost = 1.0;
  for (double v : c.c) max_cost = std::max(max_cost, v);
  for (double v : miss_costs) max_cost = std::max(max_cost, v);
  const double big = max_cost * (n + 1) + 1.0;
  const int m_aug = m + n;
  auto cost = [&](int i, int j) {  // 0-based
    if (j < m) return c.at(i, j);
    return j == m + i ? miss_costs[i] : big;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m_aug + 1, 0.0);
  std::vector<int> match(m_aug + 1, 0), way(m_aug + 1, 0);  // match[j] = row at col j (1-based)
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m_aug + 1, inf);
    std::vector<char> used(m_aug + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m_aug; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m_aug; ++j) {
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
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  for (int j = 1; j <= m_aug; ++j) {
    if (match[j] == 0) continue;
    int row = match[j] - 1;
    result.col_of_row[row] = (j - 1 < m) ? j - 1 : kMiss;
  }
  result.total_cost = assignment_cost(c, miss_costs, result.col_of_row);
  return result;
}

Assignment brute_force_lap(const CostMatrix& c, double miss_cost) {
  return brute_force_lap(c, std::vector<double>(c.rows, miss_cost));
}

Assignment brute_force_lap(const CostMatrix& c, const std::vector<double>& miss_costs) {
  c.validate();
  validate_miss(c, miss_costs);
  const int n = c.rows;
  const int m = c.cols;
  if (n > 8) throw std::invalid_argument("brute_force_lap: rows > 8 not supported");
  Assignment best;
  best.col_of_row.assign(n, kMiss);
  best.total_cost = std::numeric_limits<double>::infinity();
  std::vector<int> current(n, kMiss);
  std::vector<char> used(m, 0);
  // Rows in order, columns before miss: the first optimum found is the
  // documented tie-break (lowest column index, miss last).
  auto recurse = [&](auto&& self, int row, double running) -> void {
    if (running >= best.total_cost) return;
    if (row == n) {
      best.col_of_row = current;
      best.total_cost = running;
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current[row] = j;
      self(self, row + 1, running + c.at(row, j));
      used[j] = 0;
    }
    current[row] = kMiss;
    self(self, row + 1, running + miss_costs[row]);
  };
  recurse(recurse, 0, 0.0);
  best.total_cost = assignment_cost(c, miss_costs, best.col_of_row);
  return best;
}

}  // namespace rectrack
