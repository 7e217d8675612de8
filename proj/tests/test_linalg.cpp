#include <doctest.h>

#include "test_util.hpp"
#include "tpgdet/errors.hpp"
#include "tpgdet/linalg.hpp"

using namespace tpgdet;
using namespace testutil;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("lmmse of identity") {
  const LinearEstimator est = lmmse_matrix(Matrix::identity(2), 1.0);
  CHECK(max_abs_diff(est.w, [] {
          Matrix half = Matrix::identity(2);
          half(0, 0) = half(1, 1) = 0.5;
          return half;
        }()) < 1e-14);
}

TEST_CASE("alpha zero equals the pseudo-inverse") {
  Philox rng(101, 0);
  const Matrix h = random_matrix(3, 5, rng);
  const LinearEstimator a = lmmse_matrix(h, 0.0);
  const LinearEstimator b = pinv_matrix(h);
  CHECK(max_abs_diff(a.w, b.w) < 1e-10);
  CHECK(a.mode == MatrixMode::LMMSE);
  CHECK(b.mode == MatrixMode::PINV);
}

TEST_CASE("defining equation W (HH^T + aI) = H^T") {
  Philox rng(102, 0);
  const Matrix h = random_matrix(4, 6, rng);
  const LinearEstimator est = lmmse_matrix(h, 2.0);
  Matrix gram = matmul(h, transpose(h));
  for (int i = 0; i < 4; ++i) gram(i, i) += 2.0;
  CHECK(max_abs_diff(matmul(est.w, gram), transpose(h)) < 1e-10);
}

TEST_CASE("pinv scalar and identities") {
  Matrix h(1, 1);
  h(0, 0) = 2.0;
  CHECK(pinv_matrix(h).w(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

  Philox rng(103, 0);
  const Matrix g = random_matrix(3, 5, rng);
  const LinearEstimator est = pinv_matrix(g);
  CHECK(max_abs_diff(matmul(g, matmul(est.w, g)), g) < 1e-10);
}

TEST_CASE("singular gram reported") {
  Matrix h(2, 3);
  for (int j = 0; j < 3; ++j) h(0, j) = h(1, j) = static_cast<double>(j + 1);
  CHECK_THROWS_AS(pinv_matrix(h), SingularGram);
  CHECK_THROWS_AS(lmmse_matrix(h, 0.0), SingularGram);
  CHECK_NOTHROW(lmmse_matrix(h, 0.5));
}

TEST_CASE("alpha gradient of identity") {
  const Matrix h = Matrix::identity(2);
  const LinearEstimator est = lmmse_matrix(h, 1.0);
  const Matrix grad = lmmse_alpha_gradient(est, h);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(grad(i, j) == doctest::Approx(i == j ? -0.25 : 0.0).epsilon(1e-12));
}

TEST_CASE("alpha gradient matches finite differences on 10 instances") {
  for (int inst = 0; inst < 10; ++inst) {
    Philox rng(104, static_cast<std::uint64_t>(inst));
    const Matrix h = random_matrix(3, 5, rng);
    const double alpha = 0.3 + rng.next_double() * 2.0, eps = 1e-6;
    const Matrix grad = lmmse_alpha_gradient(lmmse_matrix(h, alpha), h);
    const Matrix up = lmmse_matrix(h, alpha + eps).w;
    const Matrix dn = lmmse_matrix(h, alpha - eps).w;
    for (std::size_t i = 0; i < grad.rows(); ++i)
      for (std::size_t j = 0; j < grad.cols(); ++j) {
        const double fd = (up(i, j) - dn(i, j)) / (2.0 * eps);
        CHECK(std::abs(grad(i, j) - fd) / std::max(std::abs(fd), 1e-12) < 1e-5);
      }
  }
}

TEST_CASE("alpha gradient decays as alpha^-2") {
  Philox rng(105, 0);
  const Matrix h = random_matrix(3, 5, rng);
  auto norm_at = [&](double alpha) {
    const Matrix g = lmmse_alpha_gradient(lmmse_matrix(h, alpha), h);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j)));
    return worst;
  };
  const double ratio = norm_at(1e3) / norm_at(1e4);
  CHECK(ratio == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("mode mismatch") {
  Philox rng(106, 0);
  const Matrix h = random_matrix(3, 5, rng);
  CHECK_THROWS_AS(lmmse_alpha_gradient(pinv_matrix(h), h), ModeMismatch);
  CHECK_THROWS_AS(lmmse_alpha_gradient(mf_matrix(h), h), ModeMismatch);
}

TEST_CASE("gram eigenvalues and conditioning in alpha") {
  Philox rng(107, 0);
  const Matrix h = random_matrix(4, 7, rng);
  const Matrix gram = matmul(h, transpose(h));

  auto shifted = [&](double alpha) {
    Matrix g = gram;
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += alpha;
    return g;
  };
  for (double alpha : {0.1, 1.0, 10.0})
    CHECK(lambda_min(shifted(alpha)) >= alpha - 1e-8);

  auto cond = [&](double alpha) {
    const Matrix g = shifted(alpha);
    return lambda_max(g) / lambda_min(g);
  };
  CHECK(cond(0.1) > cond(1.0));
  CHECK(cond(1.0) > cond(10.0));
}

TEST_CASE("continuity of W in alpha") {
  Philox rng(108, 0);
  const Matrix h = random_matrix(4, 6, rng);
  const double delta = 1e-8;
  CHECK(max_abs_diff(lmmse_matrix(h, 1.0).w, lmmse_matrix(h, 1.0 + delta).w) < 1e-6);
}

TEST_CASE("cached gram inverse is consistent") {
  Philox rng(109, 0);
  const Matrix h = random_matrix(4, 6, rng);
  const LinearEstimator est = lmmse_matrix(h, 0.7);
  Matrix gram = matmul(h, transpose(h));
  for (int i = 0; i < 4; ++i) gram(i, i) += 0.7;
  CHECK(max_abs_diff(matmul(gram, est.gram_inv), Matrix::identity(4)) < 1e-10);
}

TEST_SUITE_END();
