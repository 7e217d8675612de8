#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tpgdet/channel.hpp"
#include "tpgdet/detector.hpp"

namespace tpgdet {

struct TrainFlags {
  bool train_alpha = true;
  bool train_softness = true;
};

// Gradient of the squared loss with respect to (gamma_raw, theta, alpha).
// With shared softness the theta slot 0 carries the summed gradient.
struct GradientVector {
  Vector d_gamma_raw;
  Vector d_theta;
  double d_alpha = 0.0;

  explicit GradientVector(int t_max = 0) : d_gamma_raw(t_max, 0.0), d_theta(t_max, 0.0) {}
};

// L = D^-1 sum_i ||x_i - s_i||^2
double squared_loss(const std::vector<Vector>& x_batch, const std::vector<Vector>& s_batch);

// Batch loss after t_run layers; rebuilds the estimator from (mb.h, p).
double batch_loss(const TpgParams& p, const MiniBatch& mb, int t_run);

// Exact reverse-mode gradient of the batch loss through the unrolled
// recursion. Layers beyond t_run get zero gradient; frozen slots
// (flags / non-LMMSE mode) are zeroed.
GradientVector backward(const TpgParams& p, const MiniBatch& mb, int t_run,
                        const TrainFlags& flags = {}, double* loss_out = nullptr);

struct AdamState {
  Vector m, v;  // slot layout: [gamma_raw 0..T-1][theta T..2T-1][alpha 2T]
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(int t_max) : m(2 * t_max + 1, 0.0), v(2 * t_max + 1, 0.0) {}
};

// Bias-corrected Adam update on all slots. Zero-gradient slots are left
// bit-identical. With shared softness the single softness scalar uses theta
// slot 0 and the updated value is replicated across layers.
void adam_step(AdamState& state, TpgParams& p, const GradientVector& g, double lr);

struct TrainConfig {
  int t_max = 50;
  int batch_size = 200;                 // D
  int minibatches_per_generation = 100; // K
  double learning_rate = 1e-2;
  ChannelConfig channel;
  MatrixMode mode = MatrixMode::LMMSE;
  bool shared_softness = false;
  TrainFlags flags;
  double init_gamma_raw = 0.1;
  double init_theta = 1.0;
  // Defaults to sigma_w^2 / 2, the MMSE-optimal regularizer, when unset.
  std::optional<double> init_alpha;
  std::uint64_t seed = 1;
};

struct TrainResult {
  TpgParams params;
  std::vector<double> generation_loss;  // mean minibatch loss per generation
};

using BatchSampler = std::function<MiniBatch(std::uint64_t minibatch_index)>;

// Incremental schedule: generation t runs K minibatches with the loss taken
// after t layers; parameters carry over between generations (shared
// storage). Optimizer moments restart each generation.
TrainResult run_incremental(TpgParams init, const BatchSampler& sampler, int generations,
                            int minibatches_per_generation, double learning_rate,
                            const TrainFlags& flags);

// Detector training over the real-valued MIMO channel.
TrainResult incremental_train(const TrainConfig& cfg);

struct ToyTrainConfig {
  ToyConfig channel;
  int t_max = 20;
  int batch_size = 200;
  int minibatches_per_generation = 100;
  double learning_rate = 2e-4;
  double xi = 8.0;             // fixed softness unless train_softness
  bool train_softness = false;
  double init_gamma_raw = 0.1;  // gamma starts at 1e-2
  std::uint64_t seed = 1;
};

// Square-system toy: matched filter mode with one shared softness.
TrainResult train_toy(const ToyTrainConfig& cfg);

BatchSampler mimo_batch_sampler(const ChannelConfig& cfg, int batch_size);
BatchSampler toy_batch_sampler(const ToyConfig& cfg, int batch_size);

}  // namespace tpgdet
