#include "tpgdet/channel.hpp"

#include <cmath>

namespace tpgdet {

double sigma_from_snr(std::size_t n, double snr_db) {
  return 2.0 * static_cast<double>(n) / std::pow(10.0, snr_db / 10.0);
}

ComplexChannel sample_complex_channel(std::size_t n, std::size_t m, Philox& rng) {
  ComplexChannel ch;
  ch.n = n;
  ch.m = m;
  ch.h_tilde.rows = m;
  ch.h_tilde.cols = n;
  ch.h_tilde.a.resize(m * n);
  const double scale = std::sqrt(0.5);  // unit total variance per entry
  for (auto& e : ch.h_tilde.a) {
    const double re = scale * rng.next_gaussian();
    const double im = scale * rng.next_gaussian();
    e = {re, im};
  }
  return ch;
}

Matrix realify(const ComplexMatrix& c) {
  const std::size_t m = c.rows, n = c.cols;
  Matrix h(2 * m, 2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = c(i, j).real();
      const double im = c(i, j).imag();
      h(i, j) = re;
      h(i, n + j) = -im;
      h(m + i, j) = im;
      h(m + i, n + j) = re;
    }
  }
  return h;
}

Vector realify(std::span<const std::complex<double>> v) {
  Vector out(2 * v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = v[k].real();
    out[v.size() + k] = v[k].imag();
  }
  return out;
}

namespace {

void sample_xy(const Matrix& h, double noise_var_per_component, Philox& rng, Vector& x, Vector& y) {
  const std::size_t big_n = h.cols(), big_m = h.rows();
  x.resize(big_n);
  for (auto& v : x) v = rng.next_bipolar();
  y.resize(big_m);
  matvec(h, x, y);
  const double sd = std::sqrt(noise_var_per_component);
  for (auto& v : y) v += sd * rng.next_gaussian();
}

}  // namespace

RealChannel sample_transmission(const ChannelConfig& cfg, Philox& rng) {
  RealChannel ch;
  ch.snr_db = cfg.snr_db;
  ch.sigma_w2 = sigma_from_snr(cfg.n, cfg.snr_db);
  ch.h = realify(sample_complex_channel(cfg.n, cfg.m, rng).h_tilde);
  sample_xy(ch.h, ch.sigma_w2 / 2.0, rng, ch.x_true, ch.y);
  return ch;
}

MiniBatch sample_minibatch(const ChannelConfig& cfg, std::size_t batch, Philox& rng) {
  MiniBatch mb;
  mb.sigma_w2 = sigma_from_snr(cfg.n, cfg.snr_db);
  mb.h = realify(sample_complex_channel(cfg.n, cfg.m, rng).h_tilde);
  mb.xs.resize(batch);
  mb.ys.resize(batch);
  for (std::size_t d = 0; d < batch; ++d)
    sample_xy(mb.h, mb.sigma_w2 / 2.0, rng, mb.xs[d], mb.ys[d]);
  return mb;
}

MiniBatch sample_toy_minibatch(const ToyConfig& cfg, std::size_t batch, Philox& rng) {
  MiniBatch mb;
  mb.sigma_w2 = 2.0 * cfg.sigma2;  // per-component variance is sigma2
  mb.h = Matrix(cfg.n, cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = 0; j < cfg.n; ++j) mb.h(i, j) = rng.next_gaussian();
  mb.xs.resize(batch);
  mb.ys.resize(batch);
  for (std::size_t d = 0; d < batch; ++d) sample_xy(mb.h, cfg.sigma2, rng, mb.xs[d], mb.ys[d]);
  return mb;
}

}  // namespace tpgdet
