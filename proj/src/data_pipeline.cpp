#include "phishlex/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "phishlex/csv.hpp"
#include "phishlex/url_features.hpp"
#include "phishlex/util.hpp"

namespace phishlex::data {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Accepts the configured column name or its plural, case-insensitively
// ("url" matches a "URLs" header).
std::size_t find_url_column(const std::vector<std::string>& header,
                            const std::string& wanted) {
  const std::string lower = to_lower(wanted);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = to_lower(header[i]);
    if (h == lower || h == lower + "s") return i;
  }
  throw MissingColumnError("no \"" + wanted + "\" column in header");
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (to_lower(header[i]) == name) return i;
  }
  return std::nullopt;
}

std::optional<bool> parse_bool(const std::string& s) {
  const std::string v = to_lower(s);
  if (v == "yes" || v == "true" || v == "1") return true;
  if (v == "no" || v == "false" || v == "0") return false;
  return std::nullopt;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

IngestResult records_from_table(const csvio::Table& table, std::size_t url_col,
                                int label, Source source) {
  IngestResult result;
  result.warnings = table.malformed;
  const auto submitted = find_column(table.header, "submission_time");
  const auto verified = find_column(table.header, "verified");
  const auto online = find_column(table.header, "online");
  const auto target = find_column(table.header, "target");

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string url = trim(row[url_col]);
    if (url.empty()) {
      result.warnings.push_back({i, "empty url field"});
      continue;
    }
    RawUrlRecord rec;
    rec.url = url;
    rec.label = label;
    rec.source = source;
    if (submitted && !row[*submitted].empty()) rec.submitted_at = row[*submitted];
    if (verified) rec.verified = parse_bool(row[*verified]);
    if (online) rec.online = parse_bool(row[*online]);
    if (target && !row[*target].empty()) rec.target = row[*target];
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace

IngestResult ingest_phish_csv(const std::string& path, const IngestOptions& opts) {
  csvio::Table table = csvio::read_file(path, /*has_header=*/true);
  const std::size_t url_col = find_url_column(table.header, opts.url_column);
  return records_from_table(table, url_col, 1, Source::kPhishFeed);
}

IngestResult ingest_legit_list(const std::string& path, const IngestOptions& opts) {
  if (!std::filesystem::exists(path)) throw FileNotFoundError("no such file: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw EmptyFileError("file is empty: " + path);
  }

  // CSV mode when the first line looks like a header containing a url
  // column; otherwise every non-empty line is one URL.
  const std::size_t eol = text.find('\n');
  const std::string first_line =
      trim(text.substr(0, eol == std::string::npos ? text.size() : eol));
  bool csv_mode = false;
  {
    csvio::Table probe = csvio::parse(first_line, /*has_header=*/true);
    const std::string lower = to_lower(opts.url_column);
    for (const auto& h : probe.header) {
      const std::string hl = to_lower(trim(h));
      if (hl == lower || hl == lower + "s") {
        csv_mode = true;
        break;
      }
    }
  }

  if (csv_mode) {
    csvio::Table table = csvio::parse(text, /*has_header=*/true);
    const std::size_t url_col = find_url_column(table.header, opts.url_column);
    return records_from_table(table, url_col, 0, Source::kLegitList);
  }

  IngestResult result;
  std::istringstream lines(text);
  std::string line;
  std::size_t index = 0;
  while (std::getline(lines, line)) {
    const std::string url = trim(line);
    if (url.empty()) {
      ++index;
      continue;
    }
    RawUrlRecord rec;
    rec.url = url;
    rec.label = 0;
    rec.source = Source::kLegitList;
    result.records.push_back(std::move(rec));
    ++index;
  }
  if (result.records.empty()) throw EmptyFileError("no URLs in: " + path);
  return result;
}

MergeResult merge_dedupe(const std::vector<RawUrlRecord>& a,
                         const std::vector<RawUrlRecord>& b) {
  MergeResult result;
  std::unordered_map<std::string, std::size_t> first_index;  // url -> output slot
  std::vector<bool> conflicted;

  auto consume = [&](const RawUrlRecord& rec) {
    auto it = first_index.find(rec.url);
    if (it == first_index.end()) {
      first_index.emplace(rec.url, result.records.size());
      result.records.push_back(rec);
      conflicted.push_back(false);
      return;
    }
    ++result.duplicate_count;
    if (result.records[it->second].label != rec.label) conflicted[it->second] = true;
  };
  for (const auto& rec : a) consume(rec);
  for (const auto& rec : b) consume(rec);

  std::vector<RawUrlRecord> kept;
  kept.reserve(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    if (conflicted[i]) {
      ++result.conflict_count;
    } else {
      kept.push_back(std::move(result.records[i]));
    }
  }
  result.records = std::move(kept);
  return result;
}

namespace {

// Shared stratified index split. Returns per-record train membership.
std::vector<bool> stratified_train_mask(const std::vector<int>& labels, double ratio,
                                        std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgumentError("split ratio must be in (0, 1)");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? pos : neg).push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);

  std::vector<bool> in_train(labels.size(), false);
  auto assign = [&](const std::vector<std::size_t>& idx) {
    const auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) in_train[idx[i]] = i < n_train;
  };
  assign(pos);
  assign(neg);

  const auto train_total =
      static_cast<std::size_t>(std::count(in_train.begin(), in_train.end(), true));
  if (train_total == 0 || train_total == labels.size()) {
    throw TooFewSamplesError("split would leave an empty train or test side");
  }
  return in_train;
}

}  // namespace

SplitResult split(const std::vector<RawUrlRecord>& records, double ratio,
                  std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  const std::vector<bool> in_train = stratified_train_mask(labels, ratio, seed);

  SplitResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_train[i] ? result.train : result.test).push_back(records[i]);
  }
  return result;
}

MatrixSplitResult split_matrix(const FeatureMatrix& m, double ratio,
                               std::uint64_t seed) {
  m.check_consistent();
  const std::vector<bool> in_train = stratified_train_mask(m.labels, ratio, seed);

  MatrixSplitResult result;
  result.train.schema_version = m.schema_version;
  result.test.schema_version = m.schema_version;
  result.train.split_tag = "train";
  result.test.split_tag = "test";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    FeatureMatrix& dst = in_train[i] ? result.train : result.test;
    const auto row = m.row(i);
    dst.values.insert(dst.values.end(), row.begin(), row.end());
    dst.labels.push_back(m.labels[i]);
  }
  return result;
}

NormStats compute_stats(const FeatureMatrix& train) {
  train.check_consistent();
  if (train.rows() == 0) throw TooFewSamplesError("cannot standardize an empty matrix");
  NormStats stats;
  stats.schema_version = train.schema_version;
  stats.mean.assign(kFeatureCount, 0.0);
  stats.std.assign(kFeatureCount, 0.0);
  const double n = static_cast<double>(train.rows());
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto row = train.row(i);
    for (std::size_t j = 0; j < kFeatureCount; ++j) stats.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) stats.mean[j] /= n;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto row = train.row(i);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double d = row[j] - stats.mean[j];
      stats.std[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    stats.std[j] = std::max(std::sqrt(stats.std[j] / n), kStdFloor);
  }
  return stats;
}

FeatureMatrix apply_stats(const FeatureMatrix& m, const NormStats& stats) {
  if (m.schema_version != stats.schema_version) {
    throw SchemaMismatchError("matrix schema " + m.schema_version +
                              " does not match stats schema " + stats.schema_version);
  }
  FeatureMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      row[j] = (row[j] - stats.mean[j]) / stats.std[j];
    }
  }
  return out;
}

FeatureMatrix unstandardize(const FeatureMatrix& m, const NormStats& stats) {
  FeatureMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      row[j] = row[j] * stats.std[j] + stats.mean[j];
    }
  }
  return out;
}

std::vector<double> apply_stats_row(std::span<const double> row,
                                    const NormStats& stats) {
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    out[j] = (out[j] - stats.mean[j]) / stats.std[j];
  }
  return out;
}

std::vector<double> unstandardize_row(std::span<const double> row,
                                      const NormStats& stats) {
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    out[j] = out[j] * stats.std[j] + stats.mean[j];
  }
  return out;
}

StandardizeResult standardize(const FeatureMatrix& train, const FeatureMatrix& test) {
  if (train.schema_version != test.schema_version) {
    throw SchemaMismatchError("train/test schema versions differ");
  }
  StandardizeResult result;
  result.stats = compute_stats(train);
  result.train = apply_stats(train, result.stats);
  result.test = apply_stats(test, result.stats);
  return result;
}

void write_feature_csv(const FeatureMatrix& m, const std::string& path) {
  m.check_consistent();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  const auto& schema = features::FeatureSchema::canonical();
  for (const auto& name : schema.names) out << name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      out << util::format_double(row[j]) << ',';
    }
    out << m.labels[i] << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

FeatureMatrix read_feature_csv(const std::string& path) {
  csvio::Table table = csvio::read_file(path, /*has_header=*/true);
  const auto& schema = features::FeatureSchema::canonical();
  if (table.header.size() != kFeatureCount + 1 || table.header.back() != "label") {
    throw SchemaMismatchError("unexpected feature CSV header in " + path);
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (table.header[j] != schema.names[j]) {
      throw SchemaMismatchError("feature column " + std::to_string(j) +
                                " is \"" + table.header[j] + "\", expected \"" +
                                schema.names[j] + "\"");
    }
  }
  FeatureMatrix m;
  m.schema_version = schema.schema_version;
  m.values.reserve(table.rows.size() * kFeatureCount);
  m.labels.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      m.values.push_back(std::stod(row[j]));
    }
    m.labels.push_back(std::stoi(row[kFeatureCount]));
  }
  return m;
}

void write_stats_json(const NormStats& stats, const std::string& path) {
  nlohmann::json j{{"schema_version", stats.schema_version},
                   {"computed_on", stats.computed_on},
                   {"mean", stats.mean},
                   {"std", stats.std}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << j.dump(2) << '\n';
}

NormStats read_stats_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("no such file: " + path);
  nlohmann::json j;
  in >> j;
  NormStats stats;
  stats.schema_version = j.at("schema_version").get<std::string>();
  stats.computed_on = j.value("computed_on", "train_only");
  stats.mean = j.at("mean").get<std::vector<double>>();
  stats.std = j.at("std").get<std::vector<double>>();
  if (stats.mean.size() != kFeatureCount || stats.std.size() != kFeatureCount) {
    throw SchemaMismatchError("stats file has wrong dimensionality: " + path);
  }
  return stats;
}

}  // namespace phishlex::data
