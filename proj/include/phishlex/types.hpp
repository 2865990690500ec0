#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishlex/errors.hpp"

namespace phishlex {

inline constexpr std::size_t kFeatureCount = 21;

enum class Source { kPhishFeed, kLegitList };

inline const char* to_string(Source s) {
  return s == Source::kPhishFeed ? "phish_feed" : "legit_list";
}

// One labeled URL as ingested from a feed or list.
struct RawUrlRecord {
  std::string url;
  int label = 0;  // phishing=1, legitimate=0
  Source source = Source::kLegitList;
  std::optional<std::string> submitted_at;
  std::optional<bool> verified;
  std::optional<bool> online;
  std::optional<std::string> target;
};

// A problem with one input row; batch operations collect these instead of
// aborting.
struct RowError {
  std::size_t row_index = 0;  // 0-based index in the input
  std::string message;
};

// Dense N x 21 feature matrix with aligned labels.
struct FeatureMatrix {
  std::vector<double> values;  // row-major, N * kFeatureCount
  std::vector<int> labels;
  std::string schema_version;
  std::optional<std::string> split_tag;  // "train" or "test"

  std::size_t rows() const { return labels.size(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values.data() + i * kFeatureCount, kFeatureCount);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(values.data() + i * kFeatureCount, kFeatureCount);
  }

  void check_consistent() const {
    if (values.size() != labels.size() * kFeatureCount) {
      throw SchemaMismatchError("feature matrix rows/labels size mismatch");
    }
  }
};

// Per-feature z-score statistics, computed on the training split only.
struct NormStats {
  std::vector<double> mean;  // kFeatureCount entries
  std::vector<double> std;   // kFeatureCount entries, floored, never zero
  std::string computed_on = "train_only";
  std::string schema_version;
};

}  // namespace phishlex
