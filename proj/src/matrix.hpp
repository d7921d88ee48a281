#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace sdg {

/// Dense row-major matrix, sized for small spectral operators (N+1 <= 16).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  const double* row(int i) const { return a_.data() + std::size_t(i) * cols_; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// y = A x
void matvec(const Matrix& a, const double* x, double* y);

/// Solves A X = B for symmetric positive definite A via Cholesky.
Matrix solve_spd(Matrix a, Matrix b);

}  // namespace sdg
