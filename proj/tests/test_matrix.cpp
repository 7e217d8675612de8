#include <doctest.h>

#include "test_util.hpp"
#include "tpgdet/errors.hpp"
#include "tpgdet/matrix.hpp"

using namespace tpgdet;
using namespace testutil;

TEST_SUITE_BEGIN("matrix");

TEST_CASE("matvec against matmul") {
  Philox rng(1, 0);
  const Matrix a = random_matrix(5, 7, rng);
  const Vector x = random_vector(7, rng);
  Vector y(5);
  matvec(a, x, y);
  Matrix xcol(7, 1);
  for (int j = 0; j < 7; ++j) xcol(j, 0) = x[j];
  const Matrix prod = matmul(a, xcol);
  for (int i = 0; i < 5; ++i) CHECK(y[i] == doctest::Approx(prod(i, 0)).epsilon(1e-14));
}

TEST_CASE("matvec_t equals transpose-then-matvec bitwise") {
  Philox rng(2, 0);
  const Matrix a = random_matrix(6, 4, rng);
  const Vector x = random_vector(6, rng);
  Vector y1(4), y2(4);
  matvec_t(a, x, y1);
  matvec(transpose(a), x, y2);
  for (int j = 0; j < 4; ++j) CHECK(y1[j] == y2[j]);
}

TEST_CASE("cholesky solves SPD systems") {
  Philox rng(3, 0);
  const Matrix b = random_matrix(6, 6, rng);
  Matrix s = matmul(b, transpose(b));
  for (int i = 0; i < 6; ++i) s(i, i) += 1.0;
  const Vector rhs = random_vector(6, rng);
  const Cholesky chol(s);
  const Vector x = chol.solve(rhs);
  Vector check(6);
  matvec(s, x, check);
  CHECK(max_abs_diff(check, rhs) < 1e-10);

  const Matrix inv = chol.inverse();
  CHECK(max_abs_diff(matmul(s, inv), Matrix::identity(6)) < 1e-10);
}

TEST_CASE("cholesky rejects singular input") {
  Matrix s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 1.0;
  s(1, 0) = 1.0;
  s(1, 1) = 1.0;  // rank 1
  CHECK_THROWS_AS(Cholesky{s}, SingularGram);
}

TEST_CASE("shape mismatches throw") {
  const Matrix a(3, 4);
  Vector x(5), y(3);
  CHECK_THROWS_AS(matvec(a, x, y), ShapeMismatch);
  CHECK_THROWS_AS(matmul(a, a), ShapeMismatch);
}

TEST_SUITE_END();
