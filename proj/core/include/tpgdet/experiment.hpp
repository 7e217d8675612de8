#pragma once

#include <string>
#include <vector>

namespace tpgdet {

// Parses a JSON experiment config and dispatches to the train / ber-sweep /
// mse-curve / toy pipeline. Returns the list of files written.
// Throws ConfigError (bad config), MalformedFile / UnknownVersion /
// LengthMismatch (params files), SingularGram (numerical failure).
std::vector<std::string> run_experiment(const std::string& config_text);

std::vector<std::string> run_experiment_file(const std::string& config_path);

}  // namespace tpgdet
