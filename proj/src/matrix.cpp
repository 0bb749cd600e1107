#include "rectrack/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace rectrack {

Matrix::Matrix(int r, int c, std::initializer_list<double> values) : Matrix(r, c) {
  if (values.size() != data.size()) throw std::invalid_argument("Matrix: initializer size mismatch");
  std::copy(values.begin(), values.end(), data.begin());
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.data)); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec softmax(std::span<const double> v) {
  Vec out(v.size());
  if (v.empty()) return out;
  double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace rectrack
