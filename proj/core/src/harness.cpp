#include "tpgdet/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <thread>

#include "tpgdet/errors.hpp"
#include "tpgdet/version.hpp"

namespace tpgdet {

namespace {

constexpr std::uint64_t kBlock = 1024;

std::uint64_t count_bit_errors(const Vector& decided, const Vector& truth) {
  std::uint64_t errs = 0;
  for (std::size_t j = 0; j < truth.size(); ++j)
    if (decided[j] != truth[j]) ++errs;
  return errs;
}

}  // namespace

BerPoint ber_estimate(const Detector& det, const ChannelConfig& cfg, const StopRule& stop,
                      const std::string& detector_id, int threads) {
  if (stop.max_trials < 1) throw ConfigError("ber_estimate: max_trials must be >= 1");
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? static_cast<int>(hw) : 1;
  }

  const std::uint64_t bits_per_trial = 2 * cfg.n;
  std::uint64_t done = 0, errors = 0;

  auto run_trial = [&](std::uint64_t k) {
    Philox rng(cfg.seed, stream_id(StreamPurpose::BerTrial, k));
    const RealChannel ch = sample_transmission(cfg, rng);
    return count_bit_errors(det(ch, k), ch.x_true);
  };

  while (done < stop.max_trials) {
    const std::uint64_t block = std::min(kBlock, stop.max_trials - done);
    if (threads == 1 || block < 2 * static_cast<std::uint64_t>(threads)) {
      for (std::uint64_t k = done; k < done + block; ++k) errors += run_trial(k);
    } else {
      // integer error counts make the reduction order irrelevant
      std::vector<std::uint64_t> partial(threads, 0);
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          std::uint64_t local = 0;
          for (std::uint64_t k = done + w; k < done + block; k += threads) local += run_trial(k);
          partial[w] = local;
        });
      }
      for (auto& th : pool) th.join();
      for (std::uint64_t p : partial) errors += p;
    }
    done += block;
    if (errors >= stop.target_errors) break;
  }

  BerPoint point;
  point.detector_id = detector_id;
  point.snr_db = cfg.snr_db;
  point.trials = done;
  point.bit_errors = errors;
  point.ber = static_cast<double>(errors) / (static_cast<double>(done) * bits_per_trial);
  return point;
}

MseSeries mse_curve(const TrajectoryAlgo& algo, const InstanceSampler& sampler, int t_max,
                    std::uint64_t samples, double denom) {
  if (samples < 1) throw ConfigError("mse_curve: samples must be >= 1");
  if (!(denom > 0.0)) throw ConfigError("mse_curve: denom must be > 0");

  std::vector<double> acc(t_max, 0.0);
  for (std::uint64_t k = 0; k < samples; ++k) {
    const Instance inst = sampler(k);
    const Trajectory traj = algo(inst);
    if (traj.t_run != t_max || static_cast<int>(traj.s.size()) != t_max)
      throw ShapeMismatch("mse_curve: algorithm did not record t_max layers");
    for (int t = 0; t < t_max; ++t) {
      double err = 0.0;
      for (std::size_t j = 0; j < inst.x.size(); ++j) {
        const double d = inst.x[j] - traj.s[t][j];
        err += d * d;
      }
      acc[t] += err;
    }
  }

  MseSeries series;
  series.samples = samples;
  series.mse_db.resize(t_max);
  for (int t = 0; t < t_max; ++t) {
    const double mse = acc[t] / (static_cast<double>(samples) * denom);
    series.mse_db[t] = mse > 1e-30 ? 10.0 * std::log10(mse) : -300.0;
  }
  return series;
}

InstanceSampler mimo_instance_sampler(const ChannelConfig& cfg) {
  return [cfg](std::uint64_t k) {
    Philox rng(cfg.seed, stream_id(StreamPurpose::MseSample, k));
    RealChannel ch = sample_transmission(cfg, rng);
    return Instance{std::move(ch.h), std::move(ch.x_true), std::move(ch.y)};
  };
}

InstanceSampler toy_instance_sampler(const ToyConfig& cfg) {
  return [cfg](std::uint64_t k) {
    Philox rng(cfg.seed, stream_id(StreamPurpose::MseSample, k));
    const MiniBatch mb = sample_toy_minibatch(cfg, 1, rng);
    return Instance{mb.h, mb.xs[0], mb.ys[0]};
  };
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string version_string() { return std::string("tpgdet ") + kVersion + " git=" + kGitDescribe; }

std::string csv_preamble(std::uint64_t seed, const std::string& config_hash) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# %s\n# seed=%" PRIu64 "\n# config_hash=%s\n",
                version_string().c_str(), seed, config_hash.c_str());
  return buf;
}

std::string ber_csv(const std::vector<BerPoint>& points, std::size_t n, std::size_t m,
                    std::uint64_t seed, const std::string& config_hash) {
  std::string out = csv_preamble(seed, config_hash);
  out += "detector_id,n,m,snr_db,trials,bit_errors,ber\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.6g,%" PRIu64 ",%" PRIu64 ",%.8e\n",
                  p.detector_id.c_str(), n, m, p.snr_db, p.trials, p.bit_errors, p.ber);
    out += buf;
  }
  return out;
}

std::string mse_csv(const MseSeries& series, std::uint64_t seed, const std::string& config_hash) {
  std::string out = csv_preamble(seed, config_hash);
  out += "t,mse_db\n";
  char buf[64];
  for (std::size_t t = 0; t < series.mse_db.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", t + 1, series.mse_db[t]);
    out += buf;
  }
  return out;
}

std::string loss_csv(const std::vector<double>& generation_loss, std::uint64_t seed,
                     const std::string& config_hash) {
  std::string out = csv_preamble(seed, config_hash);
  out += "generation,mean_loss\n";
  char buf[64];
  for (std::size_t g = 0; g < generation_loss.size(); ++g) {
    std::snprintf(buf, sizeof buf, "%zu,%.10e\n", g + 1, generation_loss[g]);
    out += buf;
  }
  return out;
}

}  // namespace tpgdet
