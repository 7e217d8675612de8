#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tpgdet/matrix.hpp"
#include "tpgdet/rng.hpp"

namespace tpgdet {

struct ComplexMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::complex<double>> a;  // row-major

  std::complex<double>& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  std::complex<double> operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Flat Rayleigh-fading channel: m x n path gains, unit-variance circular
// Gaussian entries (variance 1/2 per real part).
struct ComplexChannel {
  ComplexMatrix h_tilde;
  std::size_t n = 0;  // transmit antennas
  std::size_t m = 0;  // receive antennas
};

// Equivalent real-valued model. h is M x N with M = 2m, N = 2n and the
// block structure [[Re, -Im], [Im, Re]].
struct RealChannel {
  Matrix h;
  Vector x_true;    // bipolar, length N
  Vector y;         // length M
  double sigma_w2;  // noise variance per complex dimension
  double snr_db;
};

struct ChannelConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

// sigma_w^2 = 2n / 10^(snr_db/10)
double sigma_from_snr(std::size_t n, double snr_db);

ComplexChannel sample_complex_channel(std::size_t n, std::size_t m, Philox& rng);

Matrix realify(const ComplexMatrix& c);
Vector realify(std::span<const std::complex<double>> v);

// One full transmission: fresh H, x uniform over {-1,+1}^N, y = Hx + w with
// noise variance sigma_w^2 / 2 per real component.
RealChannel sample_transmission(const ChannelConfig& cfg, Philox& rng);

// D transmissions sharing a single channel matrix; the unit fed to training.
struct MiniBatch {
  Matrix h;
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  double sigma_w2 = 0.0;
};

MiniBatch sample_minibatch(const ChannelConfig& cfg, std::size_t batch, Philox& rng);

// Square toy system: y = A x + w with A n x n, entries N(0,1), noise
// variance sigma2 per component.
struct ToyConfig {
  std::size_t n = 0;
  double sigma2 = 1.0;
  std::uint64_t seed = 0;
};

MiniBatch sample_toy_minibatch(const ToyConfig& cfg, std::size_t batch, Philox& rng);

}  // namespace tpgdet
