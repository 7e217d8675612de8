// Command-line front end: train, detect, ber-sweep, mse-curve, toy.
// Subcommands take a JSON config; flags override config fields.
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpgdet/errors.hpp"
#include "tpgdet/experiment.hpp"
#include "tpgdet/harness.hpp"
#include "tpgdet/params_io.hpp"

namespace {

using nlohmann::json;

json load_config_or_empty(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw tpgdet::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    json j = json::parse(ss.str());
    if (!j.is_object()) throw tpgdet::ConfigError("config: top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw tpgdet::ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
}

struct Overrides {
  std::optional<std::int64_t> seed, n, m, t_max, batch, k, trials, samples, threads;
  std::optional<double> snr, lr;
  std::optional<std::string> out, out_params, out_loss, out_prefix, mode, params_file;

  void apply(json& j) const {
    if (seed) j["seed"] = *seed;
    if (n) j["channel"]["n"] = *n;
    if (m) j["channel"]["m"] = *m;
    if (snr) j["channel"]["snr_db"] = *snr;
    if (t_max) j["t_max"] = *t_max;
    if (batch) j["batch_size"] = *batch;
    if (k) j["minibatches_per_generation"] = *k;
    if (lr) j["learning_rate"] = *lr;
    if (mode) j["mode"] = *mode;
    if (samples) j["samples"] = *samples;
    if (threads) j["threads"] = *threads;
    if (out) j["out"] = *out;
    if (out_params) j["out_params"] = *out_params;
    if (out_loss) j["out_loss"] = *out_loss;
    if (out_prefix) j["out_prefix"] = *out_prefix;
  }
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("-c,--config", config_path, "JSON config file");
  cmd->add_option("--seed", ov.seed, "run seed (overrides config)");
}

int run_task(const std::string& task, const std::string& config_path, const Overrides& ov) {
  json j = load_config_or_empty(config_path);
  j["task"] = task;
  ov.apply(j);
  const auto written = tpgdet::run_experiment(j.dump());
  for (const auto& f : written) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int run_detect(const std::string& params_path, std::int64_t n, std::int64_t m, double snr,
               std::int64_t seed, std::int64_t trials, const std::string& out_path) {
  const auto loaded = tpgdet::load_params_file(params_path);
  tpgdet::ChannelConfig cfg;
  cfg.n = n > 0 ? static_cast<std::size_t>(n) : loaded.meta.n;
  cfg.m = m > 0 ? static_cast<std::size_t>(m) : loaded.meta.m;
  cfg.snr_db = std::isnan(snr) ? loaded.meta.snr_db : snr;
  cfg.seed = static_cast<std::uint64_t>(seed);
  if (cfg.n < 1 || cfg.m < 1) throw tpgdet::ConfigError("detect: need n >= 1 and m >= 1");
  if (trials < 1) throw tpgdet::ConfigError("detect: trials must be >= 1");

  std::string body = "trial,bit_errors,bits\n";
  std::uint64_t total_errors = 0;
  const std::uint64_t bits = 2 * cfg.n;
  for (std::int64_t k = 0; k < trials; ++k) {
    tpgdet::Philox rng(cfg.seed, tpgdet::stream_id(tpgdet::StreamPurpose::BerTrial,
                                                   static_cast<std::uint64_t>(k)));
    const tpgdet::RealChannel ch = tpgdet::sample_transmission(cfg, rng);
    const tpgdet::Vector xhat = tpgdet::detect(loaded.params, ch.h, ch.y);
    std::uint64_t errs = 0;
    for (std::size_t jj = 0; jj < xhat.size(); ++jj)
      if (xhat[jj] != ch.x_true[jj]) ++errs;
    total_errors += errs;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld,%llu,%llu\n", static_cast<long long>(k),
                  static_cast<unsigned long long>(errs), static_cast<unsigned long long>(bits));
    body += buf;
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw tpgdet::Error("cannot open '" + out_path + "' for writing");
    f << body;
    std::printf("wrote %s\n", out_path.c_str());
  } else {
    std::fputs(body.c_str(), stdout);
  }
  std::printf("ber=%.8e over %lld trials (%llu bit errors)\n",
              static_cast<double>(total_errors) / (static_cast<double>(trials) * bits),
              static_cast<long long>(trials), static_cast<unsigned long long>(total_errors));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trainable projected gradient detection for overloaded MIMO"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tpgdet::version_string());

  std::string cfg_train, cfg_ber, cfg_mse, cfg_toy;
  Overrides ov_train, ov_ber, ov_mse, ov_toy;

  auto* train = app.add_subcommand("train", "incremental training of the detector");
  add_common(train, cfg_train, ov_train);
  train->add_option("--n", ov_train.n, "transmit antennas");
  train->add_option("--m", ov_train.m, "receive antennas");
  train->add_option("--snr", ov_train.snr, "training SNR in dB");
  train->add_option("--t-max", ov_train.t_max, "layers T");
  train->add_option("--batch-size", ov_train.batch, "minibatch size D");
  train->add_option("--minibatches", ov_train.k, "minibatches per generation K");
  train->add_option("--learning-rate", ov_train.lr, "Adam learning rate");
  train->add_option("--mode", ov_train.mode, "matrix mode: MF, PINV or LMMSE");
  train->add_option("--out-params", ov_train.out_params, "output params file");
  train->add_option("--out-loss", ov_train.out_loss, "output loss-trace CSV");

  std::string det_params, det_out;
  std::int64_t det_n = 0, det_m = 0, det_seed = 1, det_trials = 1;
  double det_snr = std::nan("");
  auto* detect_cmd = app.add_subcommand("detect", "run the detector on sampled transmissions");
  detect_cmd->add_option("-p,--params", det_params, "trained params file")->required();
  detect_cmd->add_option("--n", det_n, "transmit antennas (default: from params file)");
  detect_cmd->add_option("--m", det_m, "receive antennas (default: from params file)");
  detect_cmd->add_option("--snr", det_snr, "SNR in dB (default: from params file)");
  detect_cmd->add_option("--seed", det_seed, "run seed");
  detect_cmd->add_option("--trials", det_trials, "number of transmissions");
  detect_cmd->add_option("-o,--out", det_out, "per-trial CSV output (default: stdout)");

  auto* ber = app.add_subcommand("ber-sweep", "Monte-Carlo BER sweep over SNR");
  add_common(ber, cfg_ber, ov_ber);
  ber->add_option("--n", ov_ber.n, "transmit antennas");
  ber->add_option("--m", ov_ber.m, "receive antennas");
  ber->add_option("--threads", ov_ber.threads, "worker threads (0 = hardware)");
  ber->add_option("-o,--out", ov_ber.out, "output CSV");

  auto* mse = app.add_subcommand("mse-curve", "MSE as a function of the iteration index");
  add_common(mse, cfg_mse, ov_mse);
  mse->add_option("--samples", ov_mse.samples, "Monte-Carlo samples");
  mse->add_option("-o,--out", ov_mse.out, "output CSV");

  auto* toy = app.add_subcommand("toy", "square-system toy pipeline (train + MSE curves)");
  add_common(toy, cfg_toy, ov_toy);
  toy->add_option("--samples", ov_toy.samples, "Monte-Carlo samples");
  toy->add_option("--out-prefix", ov_toy.out_prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return run_task("train", cfg_train, ov_train);
    if (detect_cmd->parsed())
      return run_detect(det_params, det_n, det_m, det_snr, det_seed, det_trials, det_out);
    if (ber->parsed()) return run_task("ber-sweep", cfg_ber, ov_ber);
    if (mse->parsed()) return run_task("mse-curve", cfg_mse, ov_mse);
    if (toy->parsed()) return run_task("toy", cfg_toy, ov_toy);
  } catch (const tpgdet::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tpgdet::MalformedFile& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tpgdet::UnknownVersion& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tpgdet::LengthMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const tpgdet::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
