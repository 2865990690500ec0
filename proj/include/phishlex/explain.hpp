#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phishlex/types.hpp"

namespace phishlex::explain {

// Model under explanation: standardized 21-feature vector -> score. Must be
// safe to call concurrently (a frozen network's infer path is).
using Scorer = std::function<double(std::span<const double>)>;

// Reference rows defining "feature absent". Drawn without replacement from
// the (standardized) training matrix when the requested count fits.
struct BackgroundSet {
  std::vector<double> values;  // count x kFeatureCount
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static BackgroundSet sample(const FeatureMatrix& train_std, std::size_t count,
                              std::uint64_t seed);

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values.data() + i * kFeatureCount, kFeatureCount);
  }
};

inline constexpr std::size_t kDefaultBackgroundSize = 5000;
inline constexpr std::size_t kMaxExactSubset = 12;

struct Attribution {
  std::array<double, kFeatureCount> phi{};
  std::array<double, kFeatureCount> se{};  // per-feature standard error; 0 for exact
  double base_value = 0.0;
  double fx = 0.0;
  double reconstruction_gap = 0.0;  // |fx - base_value - sum(phi)|
  std::size_t n_permutations = 0;   // 0 for the exact oracle
};

// True Shapley values of the restricted game over `subset` (features outside
// it held at x), by full 2^d enumeration with background-averaged absences.
// Throws SubsetTooLargeError when |subset| > 12.
Attribution shapley_exact(const Scorer& scorer, std::span<const double> x,
                          const BackgroundSet& background,
                          std::span<const std::size_t> subset);

// Monte-Carlo permutation estimator; one background row drawn per
// permutation. Empty subset means all 21 features. Deterministic under seed.
Attribution shapley_sampled(const Scorer& scorer, std::span<const double> x,
                            const BackgroundSet& background,
                            std::size_t n_permutations, std::uint64_t seed,
                            std::span<const std::size_t> subset = {});

struct GlobalSummaryConfig {
  std::size_t n_permutations = 200;
  std::uint64_t seed = 7;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct GlobalSummary {
  std::array<double, kFeatureCount> mean_abs_phi{};
  std::vector<std::size_t> ranking;  // feature indices, descending mean |phi|
  std::string schema_version;
};

// Mean |phi| per feature over every sample row. Attribution of distinct rows
// runs in parallel; per-row RNG streams keep the result independent of
// scheduling. Pass `out_attributions` to keep the per-row attributions (for
// decision-plot export).
GlobalSummary global_summary(const Scorer& scorer, const FeatureMatrix& sample_std,
                             const BackgroundSet& background,
                             const GlobalSummaryConfig& cfg = {},
                             std::vector<Attribution>* out_attributions = nullptr);

// Plot data files (rendering is out of scope).
void write_summary_csv(const GlobalSummary& summary, const std::string& path);
void write_decision_csv(const std::vector<Attribution>& attributions,
                        const std::vector<std::size_t>& ranking,
                        const std::string& path);
// `raw_values` are the unstandardized features of the explained sample.
void write_waterfall_csv(const Attribution& attribution,
                         std::span<const double> raw_values,
                         const std::string& path);

}  // namespace phishlex::explain
