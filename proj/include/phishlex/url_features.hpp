#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phishlex/types.hpp"

namespace phishlex::features {

enum class FeatureKind { kCount, kLength, kBinary };

// Canonical ordered feature list. The order is part of the data contract;
// changing it requires a new schema_version.
struct FeatureSchema {
  std::string schema_version;
  std::array<std::string, kFeatureCount> names;
  std::array<FeatureKind, kFeatureCount> kinds;

  static const FeatureSchema& canonical();
  std::size_t index_of(const std::string& name) const;  // throws InvalidArgumentError
};

// URL split into the components the features are defined on. Counting
// features operate either on `raw` or on a named component; `path` excludes
// the '/' that separates it from the authority, `path_component()` includes
// it.
struct ParsedUrl {
  std::string raw;
  std::optional<std::string> scheme;
  std::string hostname;  // after the last '@' of the authority; no '/'
  std::string path;      // after the first '/' following the authority
  std::optional<std::string> query;
  std::string first_dir;
  bool has_path = false;  // true when the authority/path separator exists

  std::string path_component() const { return has_path ? "/" + path : path; }
};

// hostname -> "is indexed" verdict. The default stub is deterministic and
// never touches the network.
class IndexLookupProvider {
 public:
  virtual ~IndexLookupProvider() = default;
  virtual bool is_indexed(const std::string& hostname) const = 0;
};

class StubIndexProvider final : public IndexLookupProvider {
 public:
  explicit StubIndexProvider(bool verdict = true) : verdict_(verdict) {}
  bool is_indexed(const std::string&) const override { return verdict_; }

 private:
  bool verdict_;
};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string schema_version;
};

// Suspicious keywords and shortener domains. The bundled lists mirror the
// data files shipped under data/; either can be overridden by path.
struct WordLists {
  std::vector<std::string> suspicious_keywords;
  std::vector<std::string> shorteners;

  static const WordLists& bundled();
  static WordLists load(const std::string& keywords_path,
                        const std::string& shorteners_path);
};

// Throws EmptyUrlError when raw is empty or whitespace-only.
ParsedUrl parse_url(const std::string& raw);

bool hostname_is_ip(const std::string& hostname);

FeatureVector extract_features(const std::string& raw, const IndexLookupProvider& idx,
                               const WordLists& lists = WordLists::bundled());

struct BatchResult {
  FeatureMatrix matrix;
  std::vector<RowError> errors;
};

// Row order preserved; failing rows are collected, not fatal. Throws
// BatchEmptyError when no row succeeds.
BatchResult featurize_batch(const std::vector<RawUrlRecord>& records,
                            const IndexLookupProvider& idx,
                            const WordLists& lists = WordLists::bundled());

}  // namespace phishlex::features
