#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

namespace rectrack {

using Vec = std::vector<double>;

// Row-major dense matrix of doubles. Deliberately minimal: the networks in
// this project are small enough that a handful of loops beats pulling in a
// full linear-algebra stack, and the training code needs direct access to
// the storage for gradient accumulation.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  Matrix(int r, int c, std::initializer_list<double> values);

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double* row_ptr(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row_ptr(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

bool all_finite(std::span<const double> v);
bool all_finite(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);

// Numerically stable softmax (max subtraction). Output entries are positive
// and sum to 1 within 1e-12; adding a constant to the input leaves the result
// unchanged to the same tolerance.
Vec softmax(std::span<const double> v);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace rectrack
