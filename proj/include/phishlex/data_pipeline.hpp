#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phishlex/types.hpp"

namespace phishlex::data {

struct IngestOptions {
  std::string url_column = "url";
};

struct IngestResult {
  std::vector<RawUrlRecord> records;
  std::vector<RowError> warnings;
};

// PhishTank-style export: header row with a url column (name configurable);
// extra columns (submission time, verified, online, target) are carried when
// present. All records labeled phishing.
IngestResult ingest_phish_csv(const std::string& path, const IngestOptions& opts = {});

// Legitimate URLs as either a bare one-URL-per-line list or a CSV with a
// header naming the url column. All records labeled legitimate.
IngestResult ingest_legit_list(const std::string& path, const IngestOptions& opts = {});

struct MergeResult {
  std::vector<RawUrlRecord> records;
  std::size_t duplicate_count = 0;
  std::size_t conflict_count = 0;  // same URL seen with both labels; dropped
};

// Exact-string dedupe keeping the first occurrence; label conflicts are
// dropped entirely.
MergeResult merge_dedupe(const std::vector<RawUrlRecord>& a,
                         const std::vector<RawUrlRecord>& b);

struct SplitResult {
  std::vector<RawUrlRecord> train;
  std::vector<RawUrlRecord> test;
};

// Deterministic seeded shuffle, stratified by label.
SplitResult split(const std::vector<RawUrlRecord>& records, double ratio,
                  std::uint64_t seed);

// Row-index split for an already-featurized matrix, same stratified rule.
struct MatrixSplitResult {
  FeatureMatrix train;
  FeatureMatrix test;
};
MatrixSplitResult split_matrix(const FeatureMatrix& m, double ratio,
                               std::uint64_t seed);

struct StandardizeResult {
  FeatureMatrix train;
  FeatureMatrix test;
  NormStats stats;
};

inline constexpr double kStdFloor = 1e-8;

// Z-score both matrices using train-only statistics.
StandardizeResult standardize(const FeatureMatrix& train, const FeatureMatrix& test);

NormStats compute_stats(const FeatureMatrix& train);
FeatureMatrix apply_stats(const FeatureMatrix& m, const NormStats& stats);
FeatureMatrix unstandardize(const FeatureMatrix& m, const NormStats& stats);
std::vector<double> apply_stats_row(std::span<const double> row, const NormStats& stats);
std::vector<double> unstandardize_row(std::span<const double> row,
                                      const NormStats& stats);

// Feature-matrix CSV: canonical feature names + "label" header, one row per
// URL.
void write_feature_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_feature_csv(const std::string& path);

void write_stats_json(const NormStats& stats, const std::string& path);
NormStats read_stats_json(const std::string& path);

}  // namespace phishlex::data
