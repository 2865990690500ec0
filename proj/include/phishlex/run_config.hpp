#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "phishlex/types.hpp"

namespace phishlex::cli {

// Every tunable the CLI accepts. A JSON config file provides base values;
// command-line flags override field by field. Unknown keys are rejected.
struct RunConfig {
  std::string phish_csv;
  std::string legit_path;
  std::string features_csv;
  std::string checkpoint;
  std::string out;
  std::string out_dir;
  std::uint64_t seed = 42;
  double split_ratio = 0.8;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double threshold = 0.5;
  std::size_t background_size = 5000;
  std::size_t n_permutations = 200;
  std::size_t explain_samples = 100;
  std::string keywords_path;
  std::string shorteners_path;
  std::string url_column = "url";

  nlohmann::json to_json() const;
  // Applies a config-file object on top of the current values. Throws
  // ConfigError on unknown keys or wrong types.
  void apply_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
};

}  // namespace phishlex::cli
