#include "phishlex/explain.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "phishlex/url_features.hpp"
#include "phishlex/util.hpp"

namespace phishlex::explain {

namespace {

constexpr std::uint64_t kRowSalt = 0x726f77ULL;

void validate_subset(std::span<const std::size_t> subset) {
  std::vector<bool> seen(kFeatureCount, false);
  for (std::size_t j : subset) {
    if (j >= kFeatureCount) {
      throw InvalidArgumentError("feature index out of range: " + std::to_string(j));
    }
    if (seen[j]) throw InvalidArgumentError("duplicate feature index in subset");
    seen[j] = true;
  }
}

}  // namespace

BackgroundSet BackgroundSet::sample(const FeatureMatrix& train_std, std::size_t count,
                                    std::uint64_t seed) {
  train_std.check_consistent();
  if (train_std.rows() == 0) throw EmptyTrainSetError("background: empty matrix");
  BackgroundSet bg;
  bg.seed = seed;
  bg.count = std::min(count, train_std.rows());
  std::vector<std::size_t> idx(train_std.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);  // prefix = without replacement
  bg.values.reserve(bg.count * kFeatureCount);
  for (std::size_t i = 0; i < bg.count; ++i) {
    const auto row = train_std.row(idx[i]);
    bg.values.insert(bg.values.end(), row.begin(), row.end());
  }
  return bg;
}

Attribution shapley_exact(const Scorer& scorer, std::span<const double> x,
                          const BackgroundSet& background,
                          std::span<const std::size_t> subset) {
  if (x.size() != kFeatureCount) {
    throw InvalidArgumentError("explained point has wrong dimensionality");
  }
  if (subset.empty()) throw InvalidArgumentError("feature subset must be non-empty");
  if (subset.size() > kMaxExactSubset) {
    throw SubsetTooLargeError("exact enumeration limited to " +
                              std::to_string(kMaxExactSubset) + " features, got " +
                              std::to_string(subset.size()));
  }
  validate_subset(subset);
  if (background.count == 0) throw EmptyTrainSetError("background set is empty");

  const std::size_t d = subset.size();
  const std::size_t n_masks = std::size_t{1} << d;

  // v[mask]: background-averaged score with exactly the subset features in
  // `mask` taken from x, the rest of the subset from the background row.
  std::vector<double> v(n_masks, 0.0);
  std::vector<double> z(x.begin(), x.end());
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    double total = 0.0;
    for (std::size_t b = 0; b < background.count; ++b) {
      const auto bg_row = background.row(b);
      for (std::size_t i = 0; i < d; ++i) {
        z[subset[i]] = (mask >> i) & 1 ? x[subset[i]] : bg_row[subset[i]];
      }
      total += scorer(z);
    }
    v[mask] = total / static_cast<double>(background.count);
  }

  // Shapley weights w[s] = s! (d-1-s)! / d!
  std::vector<double> w(d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    double log_w = 0.0;
    for (std::size_t i = 2; i <= s; ++i) log_w += std::log(static_cast<double>(i));
    for (std::size_t i = 2; i <= d - 1 - s; ++i) {
      log_w += std::log(static_cast<double>(i));
    }
    for (std::size_t i = 2; i <= d; ++i) log_w -= std::log(static_cast<double>(i));
    w[s] = std::exp(log_w);
  }

  Attribution attr;
  attr.base_value = v[0];
  attr.fx = v[n_masks - 1];
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi += w[std::popcount(mask)] * (v[mask | bit] - v[mask]);
    }
    attr.phi[subset[i]] = phi;
  }
  const double total_phi =
      std::accumulate(attr.phi.begin(), attr.phi.end(), 0.0);
  attr.reconstruction_gap = std::abs(attr.fx - attr.base_value - total_phi);
  return attr;
}

Attribution shapley_sampled(const Scorer& scorer, std::span<const double> x,
                            const BackgroundSet& background,
                            std::size_t n_permutations, std::uint64_t seed,
                            std::span<const std::size_t> subset) {
  if (x.size() != kFeatureCount) {
    throw InvalidArgumentError("explained point has wrong dimensionality");
  }
  if (n_permutations < 10) {
    throw InvalidArgumentError("n_permutations must be at least 10");
  }
  if (background.count == 0) throw EmptyTrainSetError("background set is empty");

  std::vector<std::size_t> features(subset.begin(), subset.end());
  if (features.empty()) {
    features.resize(kFeatureCount);
    std::iota(features.begin(), features.end(), 0);
  }
  validate_subset(features);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_bg(0, background.count - 1);

  // Per-feature running sums of marginal contributions.
  std::vector<double> sum(kFeatureCount, 0.0), sum_sq(kFeatureCount, 0.0);
  double base_sum = 0.0;
  std::vector<double> z(x.begin(), x.end());
  std::vector<std::size_t> order = features;

  for (std::size_t p = 0; p < n_permutations; ++p) {
    const auto bg_row = background.row(pick_bg(rng));
    for (std::size_t j : features) z[j] = bg_row[j];
    double prev = scorer(z);
    base_sum += prev;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t j : order) {
      z[j] = x[j];
      const double cur = scorer(z);
      const double contrib = cur - prev;
      sum[j] += contrib;
      sum_sq[j] += contrib * contrib;
      prev = cur;
    }
    // z is bitwise x again for the next round.
  }

  const double n = static_cast<double>(n_permutations);
  Attribution attr;
  attr.n_permutations = n_permutations;
  attr.base_value = base_sum / n;
  attr.fx = scorer(x);
  for (std::size_t j : features) {
    const double mean = sum[j] / n;
    attr.phi[j] = mean;
    const double var = std::max(0.0, (sum_sq[j] - n * mean * mean) / (n - 1.0));
    attr.se[j] = std::sqrt(var / n);
  }
  const double total_phi = std::accumulate(attr.phi.begin(), attr.phi.end(), 0.0);
  attr.reconstruction_gap = std::abs(attr.fx - attr.base_value - total_phi);
  return attr;
}

GlobalSummary global_summary(const Scorer& scorer, const FeatureMatrix& sample_std,
                             const BackgroundSet& background,
                             const GlobalSummaryConfig& cfg,
                             std::vector<Attribution>* out_attributions) {
  sample_std.check_consistent();
  const std::size_t n = sample_std.rows();
  if (n == 0) throw EmptySampleError("no samples to explain");

  std::vector<Attribution> attributions(n);
  std::size_t n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  n_threads = std::max<std::size_t>(1, std::min(n_threads, n));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      attributions[i] =
          shapley_sampled(scorer, sample_std.row(i), background, cfg.n_permutations,
                          util::derive_seed(cfg.seed, kRowSalt + i));
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  GlobalSummary summary;
  summary.schema_version = sample_std.schema_version;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      summary.mean_abs_phi[j] += std::abs(attributions[i].phi[j]);
    }
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    summary.mean_abs_phi[j] /= static_cast<double>(n);
  }
  summary.ranking.resize(kFeatureCount);
  std::iota(summary.ranking.begin(), summary.ranking.end(), 0);
  std::stable_sort(summary.ranking.begin(), summary.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return summary.mean_abs_phi[a] > summary.mean_abs_phi[b];
                   });
  if (out_attributions) *out_attributions = std::move(attributions);
  return summary;
}

void write_summary_csv(const GlobalSummary& summary, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  const auto& schema = features::FeatureSchema::canonical();
  out << "feature,mean_abs_shap,rank\n";
  for (std::size_t r = 0; r < summary.ranking.size(); ++r) {
    const std::size_t j = summary.ranking[r];
    out << schema.names[j] << ',' << util::format_double(summary.mean_abs_phi[j])
        << ',' << (r + 1) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_decision_csv(const std::vector<Attribution>& attributions,
                        const std::vector<std::size_t>& ranking,
                        const std::string& path) {
  if (attributions.empty()) {
    throw InvalidArgumentError("no attributions for decision plot");
  }
  if (ranking.size() != kFeatureCount) {
    throw InvalidArgumentError("ranking must cover all features");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  const auto& schema = features::FeatureSchema::canonical();
  out << "sample_id,feature,cumulative_value\n";
  for (std::size_t s = 0; s < attributions.size(); ++s) {
    double cum = attributions[s].base_value;
    for (std::size_t j : ranking) {
      cum += attributions[s].phi[j];
      out << s << ',' << schema.names[j] << ',' << util::format_double(cum) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_waterfall_csv(const Attribution& attribution,
                         std::span<const double> raw_values,
                         const std::string& path) {
  if (raw_values.size() != kFeatureCount) {
    throw InvalidArgumentError("waterfall: raw feature values required");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  const auto& schema = features::FeatureSchema::canonical();
  std::vector<std::size_t> order(kFeatureCount);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(attribution.phi[a]) > std::abs(attribution.phi[b]);
  });
  out << "feature,phi,feature_value,base_value,fx\n";
  for (std::size_t j : order) {
    out << schema.names[j] << ',' << util::format_double(attribution.phi[j]) << ','
        << util::format_double(raw_values[j]) << ','
        << util::format_double(attribution.base_value) << ','
        << util::format_double(attribution.fx) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace phishlex::explain
