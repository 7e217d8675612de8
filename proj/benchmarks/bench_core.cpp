#include <benchmark/benchmark.h>

#include "tpgdet/baselines.hpp"
#include "tpgdet/channel.hpp"
#include "tpgdet/detector.hpp"
#include "tpgdet/linalg.hpp"
#include "tpgdet/train.hpp"

using namespace tpgdet;

namespace {

RealChannel make_channel(std::size_t n, std::size_t m, double snr_db) {
  Philox rng(1, 0);
  const ChannelConfig cfg{n, m, snr_db, 0};
  return sample_transmission(cfg, rng);
}

// Per-layer cost of the forward recursion; scales with M*N, no
// factorization inside the loop.
void bm_tpg_forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const RealChannel ch = make_channel(n, m, 16.0);
  const TpgParams p = TpgParams::uniform(50, 0.1, 1.0, 1.0, MatrixMode::LMMSE, false);
  const LinearEstimator est = lmmse_matrix(ch.h, p.alpha);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tpg_forward(p, est, ch.h, ch.y, p.t_max, false));
  }
  state.counters["ns_per_layer"] = benchmark::Counter(
      50.0 * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate |
                                                          benchmark::Counter::kInvert);
}
BENCHMARK(bm_tpg_forward)->Args({50, 32})->Args({100, 64})->Args({150, 96});

void bm_lmmse_build(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const RealChannel ch = make_channel(n, m, 16.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lmmse_matrix(ch.h, 1.0));
  }
}
BENCHMARK(bm_lmmse_build)->Args({50, 32})->Args({100, 64})->Args({150, 96});

void bm_backward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  Philox rng(2, 0);
  const ChannelConfig cfg{n, m, 16.0, 0};
  const MiniBatch mb = sample_minibatch(cfg, 16, rng);
  const TpgParams p = TpgParams::uniform(50, 0.1, 1.0, 1.0, MatrixMode::LMMSE, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward(p, mb, 50));
  }
}
BENCHMARK(bm_backward)->Args({50, 32})->Args({100, 64});

void bm_iwsoav(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const RealChannel ch = make_channel(n, m, 16.0);
  IwsoavConfig cfg;
  cfg.k_itr = 50;
  cfg.l_outer = static_cast<int>(state.range(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(iwsoav_detect(ch.h, ch.y, ch.sigma_w2, cfg));
  }
}
BENCHMARK(bm_iwsoav)->Args({50, 32, 1})->Args({50, 32, 5})->Args({100, 64, 1});

void bm_mmse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const RealChannel ch = make_channel(n, m, 16.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmse_detect(ch.h, ch.y, ch.sigma_w2));
  }
}
BENCHMARK(bm_mmse)->Args({50, 32})->Args({100, 64});

}  // namespace

BENCHMARK_MAIN();
