#include "tpgdet/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tpgdet/baselines.hpp"
#include "tpgdet/errors.hpp"
#include "tpgdet/harness.hpp"
#include "tpgdet/params_io.hpp"
#include "tpgdet/train.hpp"

namespace tpgdet {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("config: field '" + field + "' " + what);
}

const json& require(const json& j, const std::string& field) {
  if (!j.contains(field)) bad_field(field, "is missing");
  return j.at(field);
}

double get_num(const json& j, const std::string& field) {
  const json& v = require(j, field);
  if (!v.is_number()) bad_field(field, "must be a number");
  return v.get<double>();
}

double get_num_or(const json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number()) bad_field(field, "must be a number");
  return j.at(field).get<double>();
}

std::int64_t get_int(const json& j, const std::string& field) {
  const json& v = require(j, field);
  if (!v.is_number_integer()) bad_field(field, "must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& j, const std::string& field, std::int64_t fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number_integer()) bad_field(field, "must be an integer");
  return j.at(field).get<std::int64_t>();
}

bool get_bool_or(const json& j, const std::string& field, bool fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_boolean()) bad_field(field, "must be a boolean");
  return j.at(field).get<bool>();
}

std::string get_str(const json& j, const std::string& field) {
  const json& v = require(j, field);
  if (!v.is_string()) bad_field(field, "must be a string");
  return v.get<std::string>();
}

std::string get_str_or(const json& j, const std::string& field, const std::string& fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_string()) bad_field(field, "must be a string");
  return j.at(field).get<std::string>();
}

ChannelConfig parse_channel(const json& j, std::uint64_t seed, bool need_snr) {
  const json& c = require(j, "channel");
  ChannelConfig cfg;
  cfg.n = static_cast<std::size_t>(get_int(c, "n"));
  cfg.m = static_cast<std::size_t>(get_int(c, "m"));
  if (cfg.n < 1) bad_field("channel.n", "must be >= 1");
  if (cfg.m < 1) bad_field("channel.m", "must be >= 1");
  cfg.snr_db = need_snr ? get_num(c, "snr_db") : get_num_or(c, "snr_db", 0.0);
  cfg.seed = seed;
  return cfg;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << body;
}

// --- train ----------------------------------------------------------------

std::vector<std::string> run_train(const json& j, std::uint64_t seed, const std::string& hash) {
  TrainConfig cfg;
  cfg.channel = parse_channel(j, seed, /*need_snr=*/true);
  cfg.seed = seed;
  cfg.t_max = static_cast<int>(get_int_or(j, "t_max", 50));
  cfg.batch_size = static_cast<int>(get_int_or(j, "batch_size", 200));
  cfg.minibatches_per_generation =
      static_cast<int>(get_int_or(j, "minibatches_per_generation", 100));
  cfg.learning_rate = get_num_or(j, "learning_rate", 1e-2);
  cfg.mode = matrix_mode_from_string(get_str_or(j, "mode", "LMMSE"));
  cfg.shared_softness = get_bool_or(j, "shared_softness", false);
  cfg.flags.train_alpha = get_bool_or(j, "train_alpha", true);
  cfg.flags.train_softness = get_bool_or(j, "train_softness", true);
  cfg.init_gamma_raw = get_num_or(j, "init_gamma_raw", 0.1);
  cfg.init_theta = get_num_or(j, "init_theta", 1.0);
  if (j.contains("init_alpha") && !j.at("init_alpha").is_null())
    cfg.init_alpha = get_num(j, "init_alpha");

  const TrainResult result = incremental_train(cfg);

  std::vector<std::string> written;
  const std::string params_path = get_str(j, "out_params");
  ParamsMeta meta{cfg.channel.n, cfg.channel.m, cfg.channel.snr_db, seed};
  save_params_file(params_path, result.params, meta);
  written.push_back(params_path);

  if (j.contains("out_loss")) {
    const std::string loss_path = get_str(j, "out_loss");
    write_file(loss_path, loss_csv(result.generation_loss, seed, hash));
    written.push_back(loss_path);
  }
  return written;
}

// --- ber-sweep --------------------------------------------------------------

struct NamedDetector {
  std::string id;
  Detector fn;
};

NamedDetector make_detector(const json& d, double snr_db) {
  const std::string type = get_str(d, "type");
  const std::string id = get_str_or(d, "id", type);
  if (type == "tpg") {
    const auto loaded = load_params_file(get_str(d, "params_file"));
    const TpgParams p = loaded.params;
    return {id, [p](const RealChannel& ch, std::uint64_t) { return detect(p, ch.h, ch.y); }};
  }
  if (type == "mmse") {
    return {id, [](const RealChannel& ch, std::uint64_t) {
              return mmse_detect(ch.h, ch.y, ch.sigma_w2);
            }};
  }
  if (type == "iwsoav") {
    IwsoavConfig cfg;
    cfg.alpha = get_num_or(d, "alpha", 1.0);
    cfg.gamma = get_num_or(d, "gamma", 1.0);
    cfg.theta = get_num_or(d, "theta", 1.9);
    cfg.epsilon = get_num_or(d, "epsilon", 0.0);
    cfg.k_itr = static_cast<int>(get_int_or(d, "k_itr", 50));
    cfg.l_outer = static_cast<int>(get_int_or(d, "l_outer", 1));
    cfg.uniform_first_weights = get_bool_or(d, "uniform_first_weights", false);
    if (d.contains("alpha_per_snr")) {
      const json& table = d.at("alpha_per_snr");
      if (!table.is_object()) bad_field("alpha_per_snr", "must be an object of snr -> alpha");
      for (const auto& [key, value] : table.items()) {
        char* end = nullptr;
        const double snr_key = std::strtod(key.c_str(), &end);
        if (end == key.c_str() || *end != '\0')
          bad_field("alpha_per_snr", "has non-numeric key '" + key + "'");
        if (snr_key == snr_db) cfg.alpha = value.get<double>();
      }
    }
    return {id, [cfg](const RealChannel& ch, std::uint64_t) {
              return iwsoav_detect(ch.h, ch.y, ch.sigma_w2, cfg);
            }};
  }
  bad_field("detectors[].type", "unknown detector type '" + type + "'");
}

std::vector<std::string> run_ber_sweep(const json& j, std::uint64_t seed,
                                       const std::string& hash) {
  ChannelConfig channel = parse_channel(j, seed, /*need_snr=*/false);
  const json& snrs = require(j, "snr_db");
  if (!snrs.is_array() || snrs.empty()) bad_field("snr_db", "must be a non-empty array");
  const json& detectors = require(j, "detectors");
  if (!detectors.is_array() || detectors.empty())
    bad_field("detectors", "must be a non-empty array");

  StopRule stop;
  if (j.contains("stop")) {
    const json& s = j.at("stop");
    stop.max_trials = static_cast<std::uint64_t>(get_int_or(s, "max_trials", 1'000'000));
    stop.target_errors = static_cast<std::uint64_t>(get_int_or(s, "target_errors", 200));
  }
  const int threads = static_cast<int>(get_int_or(j, "threads", 0));

  std::vector<BerPoint> points;
  for (const auto& d : detectors) {
    for (const auto& snr : snrs) {
      if (!snr.is_number()) bad_field("snr_db", "entries must be numbers");
      channel.snr_db = snr.get<double>();
      const NamedDetector det = make_detector(d, channel.snr_db);
      points.push_back(ber_estimate(det.fn, channel, stop, det.id, threads));
    }
  }

  const std::string out = get_str(j, "out");
  write_file(out, ber_csv(points, channel.n, channel.m, seed, hash));
  return {out};
}

// --- mse-curve --------------------------------------------------------------

std::vector<std::string> run_mse_curve(const json& j, std::uint64_t seed,
                                       const std::string& hash) {
  const ChannelConfig channel = parse_channel(j, seed, /*need_snr=*/true);
  const auto samples = static_cast<std::uint64_t>(get_int_or(j, "samples", 10'000));
  const json& algo = require(j, "algorithm");
  const std::string type = get_str(algo, "type");

  TrajectoryAlgo fn;
  int t_max = 0;
  if (type == "tpg") {
    const TpgParams p = load_params_file(get_str(algo, "params_file")).params;
    t_max = p.t_max;
    fn = [p](const Instance& inst) {
      const LinearEstimator est = build_estimator(inst.a, p.mode, p.alpha);
      return tpg_forward(p, est, inst.a, inst.y, p.t_max, /*record=*/true);
    };
  } else if (type == "plain-pg") {
    const double gamma = get_num(algo, "gamma");
    const double xi = get_num(algo, "xi");
    t_max = static_cast<int>(get_int_or(algo, "t_max", 50));
    fn = [gamma, xi, t_max](const Instance& inst) {
      return plain_pg(inst.a, inst.y, gamma, xi, t_max);
    };
  } else {
    bad_field("algorithm.type", "must be 'tpg' or 'plain-pg'");
  }

  const MseSeries series =
      mse_curve(fn, mimo_instance_sampler(channel), t_max, samples, static_cast<double>(channel.n));
  const std::string out = get_str(j, "out");
  write_file(out, mse_csv(series, seed, hash));
  return {out};
}

// --- toy ---------------------------------------------------------------------

std::vector<std::string> run_toy(const json& j, std::uint64_t seed, const std::string& hash) {
  ToyTrainConfig cfg;
  cfg.channel.n = static_cast<std::size_t>(get_int(j, "n"));
  if (cfg.channel.n < 1) bad_field("n", "must be >= 1");
  cfg.channel.sigma2 = get_num(j, "sigma2");
  if (!(cfg.channel.sigma2 > 0.0)) bad_field("sigma2", "must be > 0");
  cfg.t_max = static_cast<int>(get_int_or(j, "t_max", 20));
  cfg.batch_size = static_cast<int>(get_int_or(j, "batch_size", 200));
  cfg.minibatches_per_generation =
      static_cast<int>(get_int_or(j, "minibatches_per_generation", 100));
  cfg.learning_rate = get_num_or(j, "learning_rate", 2e-4);
  cfg.xi = get_num_or(j, "xi", 8.0);
  cfg.train_softness = get_bool_or(j, "train_softness", false);
  const double init_gamma = get_num_or(j, "init_gamma", 1e-2);
  if (!(init_gamma >= 0.0)) bad_field("init_gamma", "must be >= 0");
  cfg.init_gamma_raw = std::sqrt(init_gamma);
  cfg.seed = seed;
  cfg.channel.seed = seed;  // evaluation streams (MSE) key off the same run seed

  const auto samples = static_cast<std::uint64_t>(get_int_or(j, "samples", 10'000));
  const int eval_t = static_cast<int>(get_int_or(j, "eval_t", cfg.t_max));
  if (eval_t < 1 || eval_t > cfg.t_max) bad_field("eval_t", "must be in [1, t_max]");
  const std::string prefix = get_str_or(j, "out_prefix", "toy");

  const TrainResult result = train_toy(cfg);

  std::vector<std::string> written;
  write_file(prefix + "_loss.csv", loss_csv(result.generation_loss, seed, hash));
  written.push_back(prefix + "_loss.csv");

  const InstanceSampler sampler = toy_instance_sampler(cfg.channel);
  const TpgParams trained = result.params;
  const TrajectoryAlgo tpg_algo = [trained](const Instance& inst) {
    const LinearEstimator est = mf_matrix(inst.a);
    return tpg_forward(trained, est, inst.a, inst.y, trained.t_max, /*record=*/true);
  };
  const MseSeries tpg_series =
      mse_curve(tpg_algo, sampler, cfg.t_max, samples, static_cast<double>(cfg.channel.n));
  write_file(prefix + "_tpg_mse.csv", mse_csv(tpg_series, seed, hash));
  written.push_back(prefix + "_tpg_mse.csv");

  if (j.contains("pg")) {
    const json& pg = j.at("pg");
    const double pg_xi = get_num_or(pg, "xi", 6.0);
    const double gamma_min = get_num_or(pg, "gamma_min", 1e-4);
    const double gamma_max = get_num_or(pg, "gamma_max", 1e-1);
    const int points = static_cast<int>(get_int_or(pg, "grid_points", 20));
    if (!(gamma_min > 0.0) || !(gamma_max > gamma_min)) bad_field("pg", "needs 0 < gamma_min < gamma_max");
    if (points < 1) bad_field("pg.grid_points", "must be >= 1");

    std::string grid_body;
    double best_gamma = gamma_min, best_mse = 1e300;
    MseSeries best_series;
    for (int i = 0; i < points; ++i) {
      const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      const double gamma = gamma_min * std::pow(gamma_max / gamma_min, frac);
      const TrajectoryAlgo pg_algo = [gamma, pg_xi, &cfg](const Instance& inst) {
        return plain_pg(inst.a, inst.y, gamma, pg_xi, cfg.t_max);
      };
      const MseSeries series =
          mse_curve(pg_algo, sampler, cfg.t_max, samples, static_cast<double>(cfg.channel.n));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.8e,%.6f\n", gamma, series.mse_db[eval_t - 1]);
      grid_body += buf;
      if (series.mse_db[eval_t - 1] < best_mse) {
        best_mse = series.mse_db[eval_t - 1];
        best_gamma = gamma;
        best_series = series;
      }
    }
    char head[128];
    std::snprintf(head, sizeof head, "gamma,mse_db_t%d\n", eval_t);
    write_file(prefix + "_pg_grid.csv", csv_preamble(seed, hash) + head + grid_body);
    written.push_back(prefix + "_pg_grid.csv");
    write_file(prefix + "_pg_mse.csv", mse_csv(best_series, seed, hash));
    written.push_back(prefix + "_pg_mse.csv");
    (void)best_gamma;
  }
  return written;
}

}  // namespace

std::vector<std::string> run_experiment(const std::string& config_text) {
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  const std::string task = get_str(j, "task");
  const auto seed = static_cast<std::uint64_t>(get_int_or(j, "seed", 1));
  const std::string hash = fnv1a_hex(j.dump());

  if (task == "train") return run_train(j, seed, hash);
  if (task == "ber-sweep") return run_ber_sweep(j, seed, hash);
  if (task == "mse-curve") return run_mse_curve(j, seed, hash);
  if (task == "toy") return run_toy(j, seed, hash);
  bad_field("task", "must be one of train, ber-sweep, mse-curve, toy");
}

std::vector<std::string> run_experiment_file(const std::string& config_path) {
  std::ifstream f(config_path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + config_path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return run_experiment(ss.str());
}

}  // namespace tpgdet
