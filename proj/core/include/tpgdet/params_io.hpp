#pragma once

#include <cstdint>
#include <string>

#include "tpgdet/detector.hpp"

namespace tpgdet {

// Provenance carried alongside trained parameters.
struct ParamsMeta {
  std::size_t n = 0;
  std::size_t m = 0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

struct LoadedParams {
  TpgParams params;
  ParamsMeta meta;
};

// JSON text with scalars as hex-float strings; round trips bit-exactly.
std::string save_params(const TpgParams& p, const ParamsMeta& meta);

// Throws UnknownVersion / MalformedFile / LengthMismatch.
LoadedParams load_params(const std::string& text);

void save_params_file(const std::string& path, const TpgParams& p, const ParamsMeta& meta);
LoadedParams load_params_file(const std::string& path);

}  // namespace tpgdet
