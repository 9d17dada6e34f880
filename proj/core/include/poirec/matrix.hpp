#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace poirec {

// Dense row-major matrix of doubles. The only tensor type in the model;
// a d-vector is stored as a 1xd matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  std::span<double> row(int r) {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
};

bool all_finite(const Matrix& m);

// y += a*x, shapes must match.
void axpy(Matrix& y, const Matrix& x, double a);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

// Entries i.i.d. uniform on [lo, hi).
Matrix uniform_matrix(int rows, int cols, double lo, double hi,
                      std::mt19937_64& rng);

double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace poirec
