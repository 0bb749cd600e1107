#pragma once

#include <vector>

#include "rectrack/matrix.hpp"

namespace rectrack {

// Marker for a row that takes no column (missed measurement).
inline constexpr int kMiss = -1;

// Nonnegative finite rectangular cost matrix (rows = targets, cols = measurements).
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  Vec c;

  CostMatrix() = default;
  CostMatrix(int n, int m);
  CostMatrix(int n, int m, std::initializer_list<double> values);

  double& at(int i, int j) { return c[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return c[static_cast<std::size_t>(i) * cols + j]; }
  // Throws std::invalid_argument if any entry is negative or non-finite.
  void validate() const;
};

// One column index (or kMiss) per row; column indices are pairwise distinct.
struct Assignment {
  std::vector<int> col_of_row;
  double total_cost = 0.0;
};

// Minimum-cost one-to-one assignment where every row either takes a column or
// opts out at its miss cost. Exact (shortest augmenting path on a matrix
// augmented with one exclusive miss pseudo-column per row). An empty matrix
// yields all rows missed at cost sum(miss).
Assignment solve_lap(const CostMatrix& c, double miss_cost);
Assignment solve_lap(const CostMatrix& c, const std::vector<double>& miss_costs);

// Exhaustive oracle over all row -> (column | miss) injections; requires
// rows <= 8. Ties resolve to the lexicographically first optimum when rows are
// scanned in order and each row tries columns 0..M-1 before miss.
Assignment brute_force_lap(const CostMatrix& c, double miss_cost);
Assignment brute_force_lap(const CostMatrix& c, const std::vector<double>& miss_costs);

}  // namespace rectrack
