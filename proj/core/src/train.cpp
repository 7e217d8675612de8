#include "tpgdet/train.hpp"

#include <algorithm>
#include <cmath>

#include "tpgdet/errors.hpp"

namespace tpgdet {

double squared_loss(const std::vector<Vector>& x_batch, const std::vector<Vector>& s_batch) {
  if (x_batch.size() != s_batch.size() || x_batch.empty())
    throw ShapeMismatch("squared_loss: batch sizes differ or empty");
  double acc = 0.0;
  for (std::size_t i = 0; i < x_batch.size(); ++i) {
    if (x_batch[i].size() != s_batch[i].size())
      throw ShapeMismatch("squared_loss: vector lengths differ");
    for (std::size_t j = 0; j < x_batch[i].size(); ++j) {
      const double d = x_batch[i][j] - s_batch[i][j];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(x_batch.size());
}

double batch_loss(const TpgParams& p, const MiniBatch& mb, int t_run) {
  const LinearEstimator est = build_estimator(mb.h, p.mode, p.alpha);
  double acc = 0.0;
  for (std::size_t i = 0; i < mb.xs.size(); ++i) {
    const Trajectory traj = tpg_forward(p, est, mb.h, mb.ys[i], t_run, /*record=*/false);
    const Vector& s = traj.final_s();
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double d = mb.xs[i][j] - s[j];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(mb.xs.size());
}

GradientVector backward(const TpgParams& p, const MiniBatch& mb, int t_run,
                        const TrainFlags& flags, double* loss_out) {
  if (t_run < 1 || t_run > p.t_max) throw ConfigError("backward: t_run out of range");
  if (mb.xs.empty() || mb.xs.size() != mb.ys.size())
    throw ShapeMismatch("backward: bad minibatch");

  const std::size_t big_n = mb.h.cols(), big_m = mb.h.rows();
  const std::size_t batch = mb.xs.size();
  const double inv_d = 1.0 / static_cast<double>(batch);

  const bool want_alpha = flags.train_alpha && p.mode == MatrixMode::LMMSE;
  const LinearEstimator est = build_estimator(mb.h, p.mode, p.alpha);
  Matrix dwda;
  if (want_alpha) dwda = lmmse_alpha_gradient(est, mb.h);

  GradientVector grad(p.t_max);
  double loss = 0.0;

  Vector g_s(big_n), g_r(big_n), g_u(big_n), g_e(big_m), hte(big_n);
  detail::ForwardTape tape;

  for (std::size_t i = 0; i < batch; ++i) {
    detail::tpg_forward_tape(p, est, dwda, mb.h, mb.ys[i], t_run, want_alpha, tape);
    const Vector& x = mb.xs[i];

    // seed: d/ds (1/D) ||x - s||^2
    const Vector& s_final = tape.traj.s.back();
    for (std::size_t j = 0; j < big_n; ++j) {
      const double d = x[j] - s_final[j];
      loss += inv_d * d * d;
      g_s[j] = 2.0 * inv_d * (s_final[j] - x[j]);
    }

    for (int t = t_run; t >= 1; --t) {
      const Vector& s_next = tape.traj.s[t - 1];  // s_{t+1}
      const Vector& r_t = tape.traj.r[t - 1];
      const Vector& u_t = tape.u[t - 1];
      const double theta_t = p.theta[t - 1];
      const double softness = std::max(std::abs(theta_t), kSoftnessFloor);
      const double gamma_t = p.gamma(t - 1);

      // through the soft projection
      double rg = 0.0;
      for (std::size_t j = 0; j < big_n; ++j) {
        g_r[j] = g_s[j] * (1.0 - s_next[j] * s_next[j]) / softness;
        rg += g_r[j] * r_t[j];
      }
      if (std::abs(theta_t) > kSoftnessFloor) {
        const double sign = theta_t > 0.0 ? 1.0 : -1.0;
        grad.d_theta[t - 1] += -sign / softness * rg;
      }

      // through the gradient step
      double gu = 0.0;
      for (std::size_t j = 0; j < big_n; ++j) gu += g_r[j] * u_t[j];
      grad.d_gamma_raw[t - 1] += 2.0 * p.gamma_raw[t - 1] * gu;
      if (want_alpha) grad.d_alpha += gamma_t * dot(g_r, tape.dwe[t - 1]);

      if (t == 1) break;  // s_1 = 0 is constant
      for (std::size_t j = 0; j < big_n; ++j) g_u[j] = gamma_t * g_r[j];
      matvec_t(est.w, g_u, g_e);
      matvec_t(mb.h, g_e, hte);
      for (std::size_t j = 0; j < big_n; ++j) g_s[j] = g_r[j] - hte[j];
    }
  }

  if (p.shared_softness) {
    double total = 0.0;
    for (double v : grad.d_theta) total += v;
    std::fill(grad.d_theta.begin(), grad.d_theta.end(), 0.0);
    grad.d_theta[0] = total;
  }
  if (!flags.train_softness) std::fill(grad.d_theta.begin(), grad.d_theta.end(), 0.0);
  if (!want_alpha) grad.d_alpha = 0.0;
  if (loss_out) *loss_out = loss;
  return grad;
}

namespace {

double adam_delta(AdamState& st, std::size_t slot, double g, double lr, double bc1, double bc2) {
  st.m[slot] = st.beta1 * st.m[slot] + (1.0 - st.beta1) * g;
  st.v[slot] = st.beta2 * st.v[slot] + (1.0 - st.beta2) * g * g;
  const double m_hat = st.m[slot] / bc1;
  const double v_hat = st.v[slot] / bc2;
  return -lr * m_hat / (std::sqrt(v_hat) + st.eps);
}

}  // namespace

void adam_step(AdamState& state, TpgParams& p, const GradientVector& g, double lr) {
  const int t_max = p.t_max;
  if (static_cast<int>(state.m.size()) != 2 * t_max + 1)
    throw ShapeMismatch("adam_step: state size does not match params");
  if (static_cast<int>(g.d_gamma_raw.size()) != t_max ||
      static_cast<int>(g.d_theta.size()) != t_max)
    throw ShapeMismatch("adam_step: gradient size does not match params");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (int t = 0; t < t_max; ++t)
    p.gamma_raw[t] += adam_delta(state, t, g.d_gamma_raw[t], lr, bc1, bc2);

  if (p.shared_softness) {
    p.theta[0] += adam_delta(state, t_max, g.d_theta[0], lr, bc1, bc2);
    std::fill(p.theta.begin() + 1, p.theta.end(), p.theta[0]);
  } else {
    for (int t = 0; t < t_max; ++t)
      p.theta[t] += adam_delta(state, t_max + t, g.d_theta[t], lr, bc1, bc2);
  }
  p.alpha += adam_delta(state, 2 * t_max, g.d_alpha, lr, bc1, bc2);
}

TrainResult run_incremental(TpgParams init, const BatchSampler& sampler, int generations,
                            int minibatches_per_generation, double learning_rate,
                            const TrainFlags& flags) {
  if (generations < 1 || generations > init.t_max)
    throw ConfigError("run_incremental: generations out of range");
  if (minibatches_per_generation < 0) throw ConfigError("run_incremental: K must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("run_incremental: learning rate must be > 0");

  TrainResult result;
  result.params = std::move(init);
  std::uint64_t minibatch_index = 0;

  for (int gen = 1; gen <= generations; ++gen) {
    AdamState state(result.params.t_max);
    double loss_sum = 0.0;
    for (int k = 0; k < minibatches_per_generation; ++k) {
      const MiniBatch mb = sampler(minibatch_index++);
      double loss = 0.0;
      const GradientVector g = backward(result.params, mb, gen, flags, &loss);
      adam_step(state, result.params, g, learning_rate);
      // keep alpha inside the estimator's domain
      if (result.params.alpha < 0.0) result.params.alpha = 0.0;
      loss_sum += loss;
    }
    result.generation_loss.push_back(
        minibatches_per_generation > 0 ? loss_sum / minibatches_per_generation : 0.0);
  }
  return result;
}

BatchSampler mimo_batch_sampler(const ChannelConfig& cfg, int batch_size) {
  return [cfg, batch_size](std::uint64_t index) {
    Philox rng(cfg.seed, stream_id(StreamPurpose::TrainMinibatch, index));
    return sample_minibatch(cfg, static_cast<std::size_t>(batch_size), rng);
  };
}

BatchSampler toy_batch_sampler(const ToyConfig& cfg, int batch_size) {
  return [cfg, batch_size](std::uint64_t index) {
    Philox rng(cfg.seed, stream_id(StreamPurpose::TrainMinibatch, index));
    return sample_toy_minibatch(cfg, static_cast<std::size_t>(batch_size), rng);
  };
}

TrainResult incremental_train(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (cfg.channel.n < 1 || cfg.channel.m < 1) throw ConfigError("train: antenna counts must be >= 1");

  const double alpha0 =
      cfg.init_alpha.value_or(sigma_from_snr(cfg.channel.n, cfg.channel.snr_db) / 2.0);
  TpgParams init = TpgParams::uniform(cfg.t_max, cfg.init_gamma_raw, cfg.init_theta, alpha0,
                                      cfg.mode, cfg.shared_softness);
  ChannelConfig channel = cfg.channel;
  channel.seed = cfg.seed;
  return run_incremental(std::move(init), mimo_batch_sampler(channel, cfg.batch_size), cfg.t_max,
                         cfg.minibatches_per_generation, cfg.learning_rate, cfg.flags);
}

TrainResult train_toy(const ToyTrainConfig& cfg) {
  if (cfg.batch_size < 1) throw ConfigError("train_toy: batch_size must be >= 1");
  if (!(cfg.xi > 0.0)) throw ConfigError("train_toy: xi must be > 0");

  TpgParams init = TpgParams::uniform(cfg.t_max, cfg.init_gamma_raw, 1.0 / cfg.xi, 0.0,
                                      MatrixMode::MF, /*shared_softness=*/true);
  TrainFlags flags;
  flags.train_alpha = false;
  flags.train_softness = cfg.train_softness;
  ToyConfig channel = cfg.channel;
  channel.seed = cfg.seed;
  return run_incremental(std::move(init), toy_batch_sampler(channel, cfg.batch_size), cfg.t_max,
                         cfg.minibatches_per_generation, cfg.learning_rate, flags);
}

}  // namespace tpgdet
