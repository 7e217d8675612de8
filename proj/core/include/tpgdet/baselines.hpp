#pragma once

#include <optional>
#include <span>

#include "tpgdet/detector.hpp"
#include "tpgdet/matrix.hpp"

namespace tpgdet {

// Per-symbol prior weights of the weighted SOAV objective. w_minus = 1 - w_plus.
struct WsoavWeights {
  Vector w_plus;
  int degenerate_count = 0;  // floored LLR denominators, see llr_weights

  double w_minus(std::size_t j) const { return 1.0 - w_plus[j]; }
  double d(std::size_t j) const { return 2.0 * w_plus[j] - 1.0; }

  static WsoavWeights uniform(std::size_t n) { return {Vector(n, 0.5), 0}; }
};

struct IwsoavConfig {
  double alpha = 1.0;   // fidelity weight
  double gamma = 1.0;   // prox step
  double theta = 1.9;   // relaxation, constant across iterations
  int k_itr = 50;       // inner iterations
  int l_outer = 1;      // outer loops
  double epsilon = 0.0; // relaxation bound: theta in [epsilon, 2 - epsilon]
  std::optional<Vector> r0;  // initial inner vector, zeros when unset
  // First outer loop uses w+ = 0.5 instead of weights from s_hat = 0.
  bool uniform_first_weights = false;

  void validate(std::size_t n) const;
};

// x_hat = sgn(H^T (H H^T + (sigma_w^2/2) I)^-1 y)
Vector mmse_detect(const Matrix& h, std::span<const double> y, double sigma_w2);

// Plain projected gradient, fixed step and softness:
// r_t = s_t + gamma A^T (y - A s_t);  s_{t+1} = tanh(xi r_t).
Trajectory plain_pg(const Matrix& a, std::span<const double> y, double gamma, double xi,
                    int t_max);

// Componentwise five-branch proximal map of the weighted SOAV penalty.
Vector soav_prox(std::span<const double> v, const WsoavWeights& w, double gamma);

// Douglas-Rachford inner loop. Caches (I + alpha gamma H^T H)^-1 and
// alpha gamma H^T y, so one instance serves all outer loops.
class WsoavSolver {
 public:
  WsoavSolver(const Matrix& h, std::span<const double> y, double alpha, double gamma);

  // Runs k_itr iterations from r0 (zeros when unset); returns the final z.
  Vector solve(const WsoavWeights& w, const IwsoavConfig& cfg) const;

 private:
  const Matrix& h_;
  Matrix inv_;        // (I + alpha gamma H^T H)^-1
  Vector hty_scaled_; // alpha gamma H^T y
  double gamma_;
};

Vector wsoav_solve(const Matrix& h, std::span<const double> y, const WsoavWeights& w,
                   const IwsoavConfig& cfg);

// Approximate-LLR prior weights from a tentative soft estimate. Nonpositive
// denominators are floored at 1e-12 and counted in the result.
WsoavWeights llr_weights(const Matrix& h, std::span<const double> y,
                         std::span<const double> s_hat, double sigma_w2);

// Full double loop: L rounds of reweighting + W-SOAV solving, then sgn.
Vector iwsoav_detect(const Matrix& h, std::span<const double> y, double sigma_w2,
                     const IwsoavConfig& cfg);

// Objective of the weighted SOAV problem, used by tests and diagnostics:
// sum_j w+|z_j - 1| + w-|z_j + 1| + (alpha/2)||y - Hz||^2.
double wsoav_objective(const Matrix& h, std::span<const double> y, const WsoavWeights& w,
                       double alpha, std::span<const double> z);

}  // namespace tpgdet
