#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "tpgdet/errors.hpp"
#include "tpgdet/experiment.hpp"
#include "tpgdet/harness.hpp"
#include "tpgdet/params_io.hpp"

using namespace tpgdet;
using namespace testutil;

TEST_SUITE_BEGIN("harness");

namespace {

const ChannelConfig kSmall{8, 5, 10.0, 42};

Detector oracle() {
  return [](const RealChannel& ch, std::uint64_t) { return ch.x_true; };
}

Detector adversary() {
  return [](const RealChannel& ch, std::uint64_t) {
    Vector x = ch.x_true;
    for (auto& v : x) v = -v;
    return x;
  };
}

Detector coin_flip() {
  return [](const RealChannel& ch, std::uint64_t trial) {
    Philox rng(987, stream_id(StreamPurpose::Generic, trial));
    Vector x(ch.x_true.size());
    for (auto& v : x) v = rng.next_bipolar();
    return x;
  };
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("ber of an oracle detector is zero") {
  const BerPoint p = ber_estimate(oracle(), kSmall, {500, 100}, "oracle", 1);
  CHECK(p.bit_errors == 0);
  CHECK(p.ber == 0.0);
  CHECK(p.trials == 500);  // never reaches target_errors
}

TEST_CASE("ber of an adversary detector is one") {
  const BerPoint p = ber_estimate(adversary(), kSmall, {500, 100}, "adversary", 1);
  CHECK(p.ber == 1.0);
  CHECK(p.trials <= 500);
  CHECK(p.bit_errors >= 100);
}

TEST_CASE("coin flip detector sits near one half") {
  StopRule stop{10000, 1u << 31};
  const BerPoint p = ber_estimate(coin_flip(), kSmall, stop, "coin", 0);
  CHECK(p.trials * 2 * kSmall.n >= 100000);
  CHECK(p.ber > 0.47);
  CHECK(p.ber < 0.53);
}

TEST_CASE("ber is exactly invariant under thread count") {
  StopRule stop{2000, 150};
  const BerPoint a = ber_estimate(coin_flip(), kSmall, stop, "coin", 1);
  const BerPoint b = ber_estimate(coin_flip(), kSmall, stop, "coin", 2);
  const BerPoint c = ber_estimate(coin_flip(), kSmall, stop, "coin", 7);
  CHECK(a.trials == b.trials);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.trials == c.trials);
  CHECK(a.bit_errors == c.bit_errors);
  CHECK(a.ber == c.ber);
}

TEST_CASE("mse floors at -300 dB for an exact algorithm") {
  const auto sampler = mimo_instance_sampler(kSmall);
  const TrajectoryAlgo exact = [](const Instance& inst) {
    Trajectory t;
    t.t_run = 3;
    t.r.assign(3, Vector(inst.x.size(), 0.0));
    t.s.assign(3, inst.x);
    return t;
  };
  const MseSeries s = mse_curve(exact, sampler, 3, 50, static_cast<double>(kSmall.n));
  for (double v : s.mse_db) CHECK(v == -300.0);
}

TEST_CASE("mse of the zero output follows the convention") {
  const TrajectoryAlgo zero = [](const Instance& inst) {
    Trajectory t;
    t.t_run = 2;
    t.r.assign(2, Vector(inst.x.size(), 0.0));
    t.s.assign(2, Vector(inst.x.size(), 0.0));
    return t;
  };
  // detector convention: signals have length N = 2n, divide by n -> 3.01 dB
  const MseSeries det = mse_curve(zero, mimo_instance_sampler(kSmall), 2, 20,
                                  static_cast<double>(kSmall.n));
  for (double v : det.mse_db) CHECK(v == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-9));

  // toy convention: signals have length n, divide by n -> 0 dB
  const ToyConfig toy{16, 0.5, 7};
  const MseSeries toy_series = mse_curve(zero, toy_instance_sampler(toy), 2, 20, 16.0);
  for (double v : toy_series.mse_db) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("params files round trip bit exactly") {
  Philox rng(515, 0);
  TpgParams p = TpgParams::uniform(5, 0.0, 0.0, 0.0, MatrixMode::LMMSE, false);
  for (int t = 0; t < 5; ++t) {
    p.gamma_raw[t] = rng.next_gaussian() * std::pow(10.0, -3.0 * rng.next_double());
    p.theta[t] = rng.next_gaussian();
  }
  p.alpha = 34.68;
  p.gamma_raw[0] = 1e-300;          // subnormal-adjacent
  p.theta[0] = -0.0;                // sign preserved through hex floats
  p.theta[1] = 1.0 + 1e-15;

  const ParamsMeta meta{50, 32, 16.0, 99};
  const std::string text = save_params(p, meta);
  const LoadedParams back = load_params(text);

  CHECK(back.params.t_max == 5);
  CHECK(back.params.mode == MatrixMode::LMMSE);
  CHECK(back.params.shared_softness == false);
  for (int t = 0; t < 5; ++t) {
    CHECK(std::memcmp(&back.params.gamma_raw[t], &p.gamma_raw[t], sizeof(double)) == 0);
    CHECK(std::memcmp(&back.params.theta[t], &p.theta[t], sizeof(double)) == 0);
  }
  CHECK(back.params.alpha == p.alpha);
  CHECK(back.meta.n == 50);
  CHECK(back.meta.m == 32);
  CHECK(back.meta.snr_db == 16.0);
  CHECK(back.meta.seed == 99);
}

TEST_CASE("params loader rejects bad files") {
  const TpgParams p = TpgParams::uniform(3, 0.1, 1.0, 2.0, MatrixMode::PINV, true);
  const std::string good = save_params(p, {8, 6, 12.0, 1});

  CHECK_THROWS_AS(load_params("{ not json"), MalformedFile);
  CHECK_THROWS_AS(load_params("[1,2,3]"), MalformedFile);

  std::string wrong_version = good;
  const auto pos = wrong_version.find("tpgdet-params/1");
  wrong_version.replace(pos, 15, "tpgdet-params/9");
  CHECK_THROWS_AS(load_params(wrong_version), UnknownVersion);

  // gamma array shorter than t_max
  std::string short_gamma = good;
  const auto gpos = short_gamma.find("\"gamma_raw\"");
  const auto first_comma = short_gamma.find(',', short_gamma.find('[', gpos));
  short_gamma.erase(first_comma, short_gamma.find(']', gpos) - first_comma);
  CHECK_THROWS_AS(load_params(short_gamma), LengthMismatch);
}

TEST_CASE("ber sweep experiment writes stable CSV") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tpgdet_test_sweep";
  fs::create_directories(dir);
  const std::string out = (dir / "ber.csv").string();

  const std::string config = R"({
    "task": "ber-sweep",
    "seed": 5,
    "channel": {"n": 8, "m": 5},
    "snr_db": [5, 10, 15, 20],
    "stop": {"max_trials": 40, "target_errors": 10000},
    "threads": 2,
    "detectors": [
      {"id": "mmse", "type": "mmse"},
      {"id": "iwsoav-l1", "type": "iwsoav", "k_itr": 10, "l_outer": 1,
       "alpha_per_snr": {"15": 2.0}}
    ],
    "out": ")" + out + R"("
  })";

  const auto written = run_experiment(config);
  REQUIRE(written.size() == 1);
  const std::string body = slurp(out);

  // 4 rows per detector plus preamble and header
  CHECK(body.find("detector_id,n,m,snr_db,trials,bit_errors,ber\n") != std::string::npos);
  int rows = 0;
  std::istringstream lines(body);
  std::string line;
  bool saw_header = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    ++rows;
    CHECK((line.rfind("mmse,8,5,", 0) == 0 || line.rfind("iwsoav-l1,8,5,", 0) == 0));
  }
  CHECK(rows == 8);

  run_experiment(config);
  CHECK(slurp(out) == body);  // byte identical on the second run
}

TEST_CASE("mse-curve and toy experiments run end to end") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tpgdet_test_curves";
  fs::create_directories(dir);

  const std::string mse_out = (dir / "mse.csv").string();
  const std::string mse_cfg = R"({
    "task": "mse-curve", "seed": 3,
    "channel": {"n": 8, "m": 5, "snr_db": 12},
    "samples": 40,
    "algorithm": {"type": "plain-pg", "gamma": 0.005, "xi": 6.0, "t_max": 6},
    "out": ")" + mse_out + R"("
  })";
  run_experiment(mse_cfg);
  const std::string mse_body = slurp(mse_out);
  CHECK(mse_body.find("t,mse_db\n") != std::string::npos);
  CHECK(mse_body.find("\n6,") != std::string::npos);

  const std::string prefix = (dir / "toy").string();
  const std::string toy_cfg = R"({
    "task": "toy", "seed": 4,
    "n": 8, "sigma2": 0.032, "t_max": 4, "batch_size": 8,
    "minibatches_per_generation": 3, "learning_rate": 0.001,
    "samples": 30, "init_gamma": 1e-4,
    "pg": {"xi": 6.0, "gamma_min": 1e-3, "gamma_max": 1e-1, "grid_points": 3},
    "out_prefix": ")" + prefix + R"("
  })";
  const auto files = run_experiment(toy_cfg);
  CHECK(files.size() == 4);
  for (const auto& f : files) CHECK(fs::exists(f));
  CHECK(slurp(prefix + "_pg_grid.csv").find("gamma,mse_db_t4\n") != std::string::npos);
}

TEST_CASE("config errors name the offending field") {
  CHECK_THROWS_WITH_AS(run_experiment("{}"), doctest::Contains("task"), ConfigError);
  CHECK_THROWS_WITH_AS(run_experiment(R"({"task": "ber-sweep", "seed": 1})"),
                       doctest::Contains("channel"), ConfigError);
  CHECK_THROWS_WITH_AS(run_experiment(R"({"task": "toy", "n": 0, "sigma2": 1})"),
                       doctest::Contains("'n'"), ConfigError);
  CHECK_THROWS_AS(run_experiment("not json at all"), ConfigError);
  CHECK_THROWS_WITH_AS(
      run_experiment(
          R"({"task": "mse-curve", "channel": {"n": 4, "m": 2, "snr_db": 10},
              "algorithm": {"type": "nope"}, "out": "x.csv"})"),
      doctest::Contains("algorithm.type"), ConfigError);
}

TEST_CASE("train experiment emits params and loss files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tpgdet_test_train";
  fs::create_directories(dir);
  const std::string params_out = (dir / "params.json").string();
  const std::string loss_out = (dir / "loss.csv").string();

  const std::string cfg = R"({
    "task": "train", "seed": 9,
    "channel": {"n": 6, "m": 4, "snr_db": 10},
    "t_max": 3, "batch_size": 4, "minibatches_per_generation": 2,
    "learning_rate": 0.001,
    "out_params": ")" + params_out + R"(",
    "out_loss": ")" + loss_out + R"("
  })";
  const auto files = run_experiment(cfg);
  CHECK(files.size() == 2);

  const LoadedParams loaded = load_params_file(params_out);
  CHECK(loaded.params.t_max == 3);
  CHECK(loaded.meta.n == 6);
  CHECK(loaded.meta.snr_db == 10.0);

  const std::string loss_body = slurp(loss_out);
  CHECK(loss_body.find("generation,mean_loss\n") != std::string::npos);
  CHECK(loss_body.find("\n3,") != std::string::npos);
}

TEST_SUITE_END();
