#include "tpgdet/params_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tpgdet/errors.hpp"

namespace tpgdet {

namespace {

constexpr const char* kFormatVersion = "tpgdet-params/1";

std::string hex_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_float(const nlohmann::json& j, const char* field) {
  if (!j.is_string()) throw MalformedFile(std::string("params: field '") + field + "' must be a hex-float string");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw MalformedFile(std::string("params: cannot parse float '") + s + "' in field '" + field + "'");
  return v;
}

Vector parse_float_array(const nlohmann::json& j, const char* field, std::size_t expected) {
  if (!j.is_array()) throw MalformedFile(std::string("params: field '") + field + "' must be an array");
  if (j.size() != expected)
    throw LengthMismatch(std::string("params: field '") + field + "' has length " +
                         std::to_string(j.size()) + ", expected " + std::to_string(expected));
  Vector out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_float(e, field));
  return out;
}

}  // namespace

std::string save_params(const TpgParams& p, const ParamsMeta& meta) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["n"] = meta.n;
  j["m"] = meta.m;
  j["snr_db"] = hex_float(meta.snr_db);
  j["seed"] = meta.seed;
  j["t_max"] = p.t_max;
  j["mode"] = to_string(p.mode);
  j["shared_softness"] = p.shared_softness;
  nlohmann::json gammas = nlohmann::json::array(), thetas = nlohmann::json::array();
  for (double g : p.gamma_raw) gammas.push_back(hex_float(g));
  for (double t : p.theta) thetas.push_back(hex_float(t));
  j["gamma_raw"] = std::move(gammas);
  j["theta"] = std::move(thetas);
  j["alpha"] = hex_float(p.alpha);
  return j.dump(2) + "\n";
}

LoadedParams load_params(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFile(std::string("params: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MalformedFile("params: top level must be an object");
  if (!j.contains("version") || !j["version"].is_string())
    throw MalformedFile("params: missing version string");
  if (j["version"].get<std::string>() != kFormatVersion)
    throw UnknownVersion("params: unrecognized version '" + j["version"].get<std::string>() + "'");

  for (const char* field : {"n", "m", "seed", "t_max", "mode", "shared_softness", "gamma_raw",
                            "theta", "alpha", "snr_db"})
    if (!j.contains(field)) throw MalformedFile(std::string("params: missing field '") + field + "'");

  LoadedParams out;
  try {
    out.meta.n = j["n"].get<std::size_t>();
    out.meta.m = j["m"].get<std::size_t>();
    out.meta.seed = j["seed"].get<std::uint64_t>();
    out.params.t_max = j["t_max"].get<int>();
    out.params.shared_softness = j["shared_softness"].get<bool>();
    out.params.mode = matrix_mode_from_string(j["mode"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("params: bad field type: ") + e.what());
  }
  if (out.params.t_max < 1) throw MalformedFile("params: t_max must be >= 1");
  out.meta.snr_db = parse_float(j["snr_db"], "snr_db");
  out.params.gamma_raw =
      parse_float_array(j["gamma_raw"], "gamma_raw", static_cast<std::size_t>(out.params.t_max));
  out.params.theta =
      parse_float_array(j["theta"], "theta", static_cast<std::size_t>(out.params.t_max));
  out.params.alpha = parse_float(j["alpha"], "alpha");
  return out;
}

void save_params_file(const std::string& path, const TpgParams& p, const ParamsMeta& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << save_params(p, meta);
}

LoadedParams load_params_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MalformedFile("cannot open params file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_params(ss.str());
}

}  // namespace tpgdet
