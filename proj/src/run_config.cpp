#include "phishlex/run_config.hpp"

#include <fstream>

namespace phishlex::cli {

nlohmann::json RunConfig::to_json() const {
  return {{"phish_csv", phish_csv},
          {"legit_path", legit_path},
          {"features_csv", features_csv},
          {"checkpoint", checkpoint},
          {"out", out},
          {"out_dir", out_dir},
          {"seed", seed},
          {"split_ratio", split_ratio},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"threshold", threshold},
          {"background_size", background_size},
          {"n_permutations", n_permutations},
          {"explain_samples", explain_samples},
          {"keywords_path", keywords_path},
          {"shorteners_path", shorteners_path},
          {"url_column", url_column}};
}

void RunConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "phish_csv") phish_csv = value.get<std::string>();
      else if (key == "legit_path") legit_path = value.get<std::string>();
      else if (key == "features_csv") features_csv = value.get<std::string>();
      else if (key == "checkpoint") checkpoint = value.get<std::string>();
      else if (key == "out") out = value.get<std::string>();
      else if (key == "out_dir") out_dir = value.get<std::string>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else if (key == "split_ratio") split_ratio = value.get<double>();
      else if (key == "epochs") epochs = value.get<std::size_t>();
      else if (key == "batch_size") batch_size = value.get<std::size_t>();
      else if (key == "threshold") threshold = value.get<double>();
      else if (key == "background_size") background_size = value.get<std::size_t>();
      else if (key == "n_permutations") n_permutations = value.get<std::size_t>();
      else if (key == "explain_samples") explain_samples = value.get<std::size_t>();
      else if (key == "keywords_path") keywords_path = value.get<std::string>();
      else if (key == "shorteners_path") shorteners_path = value.get<std::string>();
      else if (key == "url_column") url_column = value.get<std::string>();
      else throw ConfigError("unknown config key: \"" + key + "\"");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for config key \"" + key + "\": " + e.what());
    }
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  RunConfig cfg;
  cfg.apply_json(j);
  return cfg;
}

}  // namespace phishlex::cli
