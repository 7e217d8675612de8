#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tpgdet/channel.hpp"
#include "tpgdet/detector.hpp"

namespace tpgdet {

struct BerPoint {
  std::string detector_id;
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
};

struct StopRule {
  std::uint64_t max_trials = 1'000'000;
  std::uint64_t target_errors = 200;
};

using Detector = std::function<Vector(const RealChannel&, std::uint64_t trial)>;

// Monte-Carlo BER. Trial k draws its channel from (cfg.seed, stream k), so
// the estimate is exactly invariant under the number of threads. Trials run
// in fixed-size blocks; the stopping rule is evaluated between blocks.
BerPoint ber_estimate(const Detector& det, const ChannelConfig& cfg, const StopRule& stop,
                      const std::string& detector_id, int threads = 0);

struct MseSeries {
  std::vector<double> mse_db;  // index t-1 holds the error of s_{t+1}
  std::uint64_t samples = 0;
};

// A generic problem instance (a may be a realified channel or the toy A).
struct Instance {
  Matrix a;
  Vector x;
  Vector y;
};

using InstanceSampler = std::function<Instance(std::uint64_t k)>;
using TrajectoryAlgo = std::function<Trajectory(const Instance&)>;

// Average of 10 log10(E ||x - s_{t+1}||^2 / denom) across samples, floored
// at -300 dB. denom is the antenna count n in both conventions.
MseSeries mse_curve(const TrajectoryAlgo& algo, const InstanceSampler& sampler, int t_max,
                    std::uint64_t samples, double denom);

InstanceSampler mimo_instance_sampler(const ChannelConfig& cfg);
InstanceSampler toy_instance_sampler(const ToyConfig& cfg);

// CSV emission: '#'-prefixed metadata preamble, then a header row.
std::string csv_preamble(std::uint64_t seed, const std::string& config_hash);
std::string ber_csv(const std::vector<BerPoint>& points, std::size_t n, std::size_t m,
                    std::uint64_t seed, const std::string& config_hash);
std::string mse_csv(const MseSeries& series, std::uint64_t seed, const std::string& config_hash);
std::string loss_csv(const std::vector<double>& generation_loss, std::uint64_t seed,
                     const std::string& config_hash);

std::string fnv1a_hex(const std::string& bytes);
std::string version_string();

}  // namespace tpgdet
