#include "tpgdet/linalg.hpp"

#include "tpgdet/errors.hpp"

namespace tpgdet {

std::string to_string(MatrixMode mode) {
  switch (mode) {
    case MatrixMode::MF: return "MF";
    case MatrixMode::PINV: return "PINV";
    case MatrixMode::LMMSE: return "LMMSE";
  }
  return "?";
}

MatrixMode matrix_mode_from_string(const std::string& s) {
  if (s == "MF") return MatrixMode::MF;
  if (s == "PINV") return MatrixMode::PINV;
  if (s == "LMMSE") return MatrixMode::LMMSE;
  throw ConfigError("unknown matrix mode '" + s + "' (expected MF, PINV or LMMSE)");
}

namespace {

LinearEstimator regularized_inverse(const Matrix& h, double alpha, MatrixMode mode) {
  const std::size_t big_m = h.rows();
  Matrix gram(big_m, big_m);
  for (std::size_t i = 0; i < big_m; ++i) {
    const double* hi = h.row(i);
    for (std::size_t k = i; k < big_m; ++k) {
      const double* hk = h.row(k);
      double acc = 0.0;
      for (std::size_t j = 0; j < h.cols(); ++j) acc += hi[j] * hk[j];
      gram(i, k) = acc;
      gram(k, i) = acc;
    }
    gram(i, i) += alpha;
  }
  Cholesky chol(gram);
  LinearEstimator est;
  est.mode = mode;
  est.alpha = alpha;
  est.gram_inv = chol.inverse();
  est.w = matmul(transpose(h), est.gram_inv);
  return est;
}

}  // namespace

LinearEstimator lmmse_matrix(const Matrix& h, double alpha) {
  if (alpha < 0.0) throw ConfigError("lmmse_matrix: alpha must be >= 0");
  return regularized_inverse(h, alpha, MatrixMode::LMMSE);
}

LinearEstimator pinv_matrix(const Matrix& h) {
  return regularized_inverse(h, 0.0, MatrixMode::PINV);
}

LinearEstimator mf_matrix(const Matrix& h) {
  LinearEstimator est;
  est.mode = MatrixMode::MF;
  est.w = transpose(h);
  return est;
}

LinearEstimator build_estimator(const Matrix& h, MatrixMode mode, double alpha) {
  switch (mode) {
    case MatrixMode::MF: return mf_matrix(h);
    case MatrixMode::PINV: return pinv_matrix(h);
    case MatrixMode::LMMSE: return lmmse_matrix(h, alpha);
  }
  throw ConfigError("build_estimator: bad mode");
}

Matrix lmmse_alpha_gradient(const LinearEstimator& est, const Matrix& h) {
  if (est.mode != MatrixMode::LMMSE)
    throw ModeMismatch("lmmse_alpha_gradient: estimator mode is " + to_string(est.mode));
  if (est.w.rows() != h.cols() || est.gram_inv.rows() != h.rows())
    throw ShapeMismatch("lmmse_alpha_gradient: estimator does not match h");
  Matrix grad = matmul(est.w, est.gram_inv);  // H^T G^-1 G^-1
  for (std::size_t i = 0; i < grad.rows(); ++i)
    for (std::size_t j = 0; j < grad.cols(); ++j) grad(i, j) = -grad(i, j);
  return grad;
}

}  // namespace tpgdet
