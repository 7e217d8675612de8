#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tpgdet/linalg.hpp"
#include "tpgdet/matrix.hpp"

namespace tpgdet {

// Guard for the division by |theta_t|; chosen because the projection is
// undefined at theta = 0 and training can wander there.
inline constexpr double kSoftnessFloor = 1e-8;

// The 2T+1 trainable scalars. Step sizes are stored as square roots so the
// effective gamma_t = gamma_raw_t^2 is never negative. With shared_softness
// one softness value is replicated across layers (the square-system toy
// uses this with xi = 1/|theta|).
struct TpgParams {
  int t_max = 0;
  Vector gamma_raw;  // length t_max
  Vector theta;      // length t_max
  double alpha = 0.0;
  MatrixMode mode = MatrixMode::LMMSE;
  bool shared_softness = false;

  static TpgParams uniform(int t_max, double gamma_raw_init, double theta_init, double alpha_init,
                           MatrixMode mode, bool shared_softness);

  double gamma(int t) const { return gamma_raw[t] * gamma_raw[t]; }
  int trainable_count() const { return 2 * t_max + 1; }
};

// Iterates r_t, s_{t+1} for t = 1..t_run. r[k]/s[k] hold r_{k+1}, s_{k+2}
// when recorded; otherwise only the final pair is kept.
struct Trajectory {
  std::vector<Vector> r;
  std::vector<Vector> s;
  int t_run = 0;

  const Vector& final_s() const { return s.back(); }
  const Vector& final_r() const { return r.back(); }
};

// r_t = s_t + gamma_t W (y - H s_t);  s_{t+1} = tanh(r_t / max(|theta_t|, eps)).
// Starts from s_1 = 0.
Trajectory tpg_forward(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                       std::span<const double> y, int t_run, bool record);

// Continuation entry point: runs layers t_begin..t_end from a given state.
// tpg_forward(p, est, h, y, t, rec) == tpg_forward_from(p, est, h, y, 1, t, zeros, rec).
Trajectory tpg_forward_from(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                            std::span<const double> y, int t_begin, int t_end,
                            std::span<const double> s_init, bool record);

// Componentwise sign with sgn(z) = -1 for z <= 0.
Vector hard_decision(std::span<const double> s);

// Builds the estimator for p.mode, runs all t_max layers, slices.
Vector detect(const TpgParams& p, const Matrix& h, std::span<const double> y);

namespace detail {

// Forward pass with everything the reverse pass needs. u[k] = W e_{k+1};
// dwe[k] = (dW/dalpha) e_{k+1} (filled only when want_alpha). Buffers are
// reused across calls, so one tape serves a whole minibatch without
// reallocating.
struct ForwardTape {
  Trajectory traj;
  std::vector<Vector> u;
  std::vector<Vector> dwe;
};

void tpg_forward_tape(const TpgParams& p, const LinearEstimator& est, const Matrix& dwda,
                      const Matrix& h, std::span<const double> y, int t_run, bool want_alpha,
                      ForwardTape& tape);

}  // namespace detail

}  // namespace tpgdet
