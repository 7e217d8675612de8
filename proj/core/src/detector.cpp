#include "tpgdet/detector.hpp"

#include <algorithm>
#include <cmath>

#include "tpgdet/errors.hpp"

namespace tpgdet {

TpgParams TpgParams::uniform(int t_max, double gamma_raw_init, double theta_init,
                             double alpha_init, MatrixMode mode, bool shared_softness) {
  if (t_max < 1) throw ConfigError("TpgParams: t_max must be >= 1");
  TpgParams p;
  p.t_max = t_max;
  p.gamma_raw.assign(t_max, gamma_raw_init);
  p.theta.assign(t_max, theta_init);
  p.alpha = alpha_init;
  p.mode = mode;
  p.shared_softness = shared_softness;
  return p;
}

namespace {

struct LayerBuffers {
  Vector e;   // y - H s_t
  Vector hs;  // H s_t
};

void check_forward_args(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                        std::span<const double> y, int t_begin, int t_end) {
  if (t_begin < 1 || t_end > p.t_max || t_begin > t_end)
    throw ConfigError("tpg_forward: layer range out of bounds");
  if (est.w.rows() != h.cols() || est.w.cols() != h.rows())
    throw ShapeMismatch("tpg_forward: estimator does not match h");
  if (y.size() != h.rows()) throw ShapeMismatch("tpg_forward: y length != rows of h");
  if (static_cast<int>(p.gamma_raw.size()) != p.t_max ||
      static_cast<int>(p.theta.size()) != p.t_max)
    throw ShapeMismatch("tpg_forward: parameter arrays do not match t_max");
}

void run_forward(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                 std::span<const double> y, int t_begin, int t_end,
                 std::span<const double> s_init, bool record, Trajectory& traj,
                 detail::ForwardTape* tape, const Matrix* dwda) {
  const std::size_t big_n = h.cols(), big_m = h.rows();
  const int t_run = t_end - t_begin + 1;
  traj.t_run = t_run;
  traj.r.resize(record ? t_run : 1);
  traj.s.resize(record ? t_run : 1);
  if (tape) {
    tape->u.resize(t_run);
    if (dwda) tape->dwe.resize(t_run);
  }

  Vector s(s_init.begin(), s_init.end());
  Vector e(big_m), u(big_n), r(big_n);

  for (int t = t_begin; t <= t_end; ++t) {
    matvec(h, s, e);
    for (std::size_t i = 0; i < big_m; ++i) e[i] = y[i] - e[i];
    matvec(est.w, e, u);

    const double gamma_t = p.gamma(t - 1);
    for (std::size_t j = 0; j < big_n; ++j) r[j] = s[j] + gamma_t * u[j];

    const double softness = std::max(std::abs(p.theta[t - 1]), kSoftnessFloor);
    for (std::size_t j = 0; j < big_n; ++j) s[j] = std::tanh(r[j] / softness);

    const int slot = t - t_begin;
    if (tape) {
      tape->u[slot] = u;
      if (dwda) {
        tape->dwe[slot].resize(big_n);
        matvec(*dwda, e, tape->dwe[slot]);
      }
    }
    if (record) {
      traj.r[slot] = r;
      traj.s[slot] = s;
    } else if (t == t_end) {
      traj.r[0] = r;
      traj.s[0] = s;
    }
  }
}

}  // namespace

Trajectory tpg_forward(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                       std::span<const double> y, int t_run, bool record) {
  check_forward_args(p, est, h, y, 1, t_run);
  Vector zeros(h.cols(), 0.0);
  Trajectory traj;
  run_forward(p, est, h, y, 1, t_run, zeros, record, traj, nullptr, nullptr);
  return traj;
}

Trajectory tpg_forward_from(const TpgParams& p, const LinearEstimator& est, const Matrix& h,
                            std::span<const double> y, int t_begin, int t_end,
                            std::span<const double> s_init, bool record) {
  check_forward_args(p, est, h, y, t_begin, t_end);
  if (s_init.size() != h.cols()) throw ShapeMismatch("tpg_forward_from: bad s_init length");
  Trajectory traj;
  run_forward(p, est, h, y, t_begin, t_end, s_init, record, traj, nullptr, nullptr);
  return traj;
}

Vector hard_decision(std::span<const double> s) {
  Vector out(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) out[j] = (s[j] <= 0.0) ? -1.0 : 1.0;
  return out;
}

Vector detect(const TpgParams& p, const Matrix& h, std::span<const double> y) {
  const LinearEstimator est = build_estimator(h, p.mode, p.alpha);
  const Trajectory traj = tpg_forward(p, est, h, y, p.t_max, /*record=*/false);
  return hard_decision(traj.final_s());
}

namespace detail {

void tpg_forward_tape(const TpgParams& p, const LinearEstimator& est, const Matrix& dwda,
                      const Matrix& h, std::span<const double> y, int t_run, bool want_alpha,
                      ForwardTape& tape) {
  check_forward_args(p, est, h, y, 1, t_run);
  Vector zeros(h.cols(), 0.0);
  run_forward(p, est, h, y, 1, t_run, zeros, /*record=*/true, tape.traj, &tape,
              want_alpha ? &dwda : nullptr);
}

}  // namespace detail

}  // namespace tpgdet
