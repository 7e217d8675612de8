#include "tpgdet/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace tpgdet {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> out) {
  if (x.size() != a.cols() || out.size() != a.rows()) throw ShapeMismatch("matvec: bad shapes");
  const std::size_t rows = a.rows(), cols = a.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ai = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += ai[j] * x[j];
    out[i] = acc;
  }
}

void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> out) {
  if (x.size() != a.rows() || out.size() != a.cols()) throw ShapeMismatch("matvec_t: bad shapes");
  const std::size_t rows = a.rows(), cols = a.cols();
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ai = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < cols; ++j) out[j] += ai[j] * xi;
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2_sq(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

void axpy(double c, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ShapeMismatch("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

Cholesky::Cholesky(const Matrix& spd) {
  if (spd.rows() != spd.cols()) throw ShapeMismatch("cholesky: matrix not square");
  const std::size_t n = spd.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(spd(i, i)));
  const double floor = 1e-12 * max_diag;

  l_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > floor)) throw SingularGram("cholesky: pivot below 1e-12 * max diagonal");
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

void Cholesky::solve_inplace(std::span<double> b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) throw ShapeMismatch("cholesky solve: length mismatch");
  for (std::size_t i = 0; i < n; ++i) {  // L z = b
    double s = b[i];
    const double* li = l_.row(i);
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // L^T x = z
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * b[k];
    b[ii] = s / l_(ii, ii);
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_inplace(x);
  return x;
}

Matrix Cholesky::inverse() const {
  const std::size_t n = l_.rows();
  Matrix inv(n, n);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    solve_inplace(col);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace tpgdet
