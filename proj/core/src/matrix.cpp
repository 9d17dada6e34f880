#include "poirec/matrix.hpp"

#include <algorithm>
#include <cassert>

namespace poirec {

bool all_finite(const Matrix& m) {
  return std::all_of(m.data.begin(), m.data.end(),
                     [](double v) { return std::isfinite(v); });
}

void axpy(Matrix& y, const Matrix& x, double a) {
  assert(y.same_shape(x));
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix uniform_matrix(int rows, int cols, double lo, double hi,
                      std::mt19937_64& rng) {
  Matrix m(rows, cols);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

double max_abs(const Matrix& m) {
  double r = 0.0;
  for (double v : m.data) r = std::max(r, std::fabs(v));
  return r;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.same_shape(b));
  double r = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    r = std::max(r, std::fabs(a.data[i] - b.data[i]));
  return r;
}

}  // namespace poirec
