#pragma once

#include <string>

#include "tpgdet/matrix.hpp"

namespace tpgdet {

// Choice of the linear filter W in the gradient step.
enum class MatrixMode { MF, PINV, LMMSE };

std::string to_string(MatrixMode mode);
MatrixMode matrix_mode_from_string(const std::string& s);

// W applied in the gradient step, plus the cached Gram inverse it was built
// from. Immutable after construction.
struct LinearEstimator {
  Matrix w;         // N x M
  MatrixMode mode = MatrixMode::MF;
  double alpha = 0.0;
  Matrix gram_inv;  // (H H^T + alpha I)^-1, M x M; empty for MF
};

// W = H^T (H H^T + alpha I)^-1 via Cholesky of the M x M Gram matrix.
LinearEstimator lmmse_matrix(const Matrix& h, double alpha);

// Moore-Penrose pseudo-inverse of a full-row-rank H.
LinearEstimator pinv_matrix(const Matrix& h);

// Matched filter, W = H^T.
LinearEstimator mf_matrix(const Matrix& h);

LinearEstimator build_estimator(const Matrix& h, MatrixMode mode, double alpha);

// dW/dalpha = -H^T (H H^T + alpha I)^-2, using the cached inverse.
Matrix lmmse_alpha_gradient(const LinearEstimator& est, const Matrix& h);

}  // namespace tpgdet
