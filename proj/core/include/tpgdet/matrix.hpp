#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tpgdet/errors.hpp"

namespace tpgdet {

using Vector = std::vector<double>;

// Dense row-major matrix. Everything here is 64-bit; sizes stay small
// (hundreds of rows), so no blocking or external BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// out = A x
void matvec(const Matrix& a, std::span<const double> x, std::span<double> out);
// out = A^T x
void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> out);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2_sq(std::span<const double> a);
// y += c * x
void axpy(double c, std::span<const double> x, std::span<double> y);

// Cholesky factorization of a symmetric positive-definite matrix.
// Throws SingularGram when a pivot falls below 1e-12 times the largest
// diagonal entry of the input.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& spd);

  std::size_t dim() const { return l_.rows(); }
  void solve_inplace(std::span<double> b) const;
  Vector solve(std::span<const double> b) const;
  Matrix inverse() const;

 private:
  Matrix l_;  // lower triangle
};

}  // namespace tpgdet
