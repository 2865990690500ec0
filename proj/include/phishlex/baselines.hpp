#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phishlex/model.hpp"
#include "phishlex/types.hpp"

namespace phishlex::baselines {

// Brute-force k-nearest-neighbors over standardized features, Euclidean
// metric, majority vote. Vote ties go to the label of the single nearest
// neighbor.
class KnnModel {
 public:
  static KnnModel fit(const FeatureMatrix& train_std, std::size_t k = 5);

  int predict_one(std::span<const double> x) const;
  std::vector<int> predict(const FeatureMatrix& m) const;
  model::EvalReport evaluate(const FeatureMatrix& test_std,
                             double threshold = 0.5) const;

  std::size_t k() const { return k_; }

 private:
  FeatureMatrix train_;
  std::size_t k_ = 5;
};

// dense(21 -> 64, ReLU) -> dense(64 -> 1, sigmoid) on the same features,
// trained with the same loop as the CNN.
class MlpModel {
 public:
  explicit MlpModel(std::uint64_t seed = 42);

  nn::Network& network() { return net_; }
  nn::ParamCounts param_counts() { return net_.param_counts(); }

  model::History fit(const FeatureMatrix& train_std, const FeatureMatrix& test_std,
                     const model::TrainLoopConfig& cfg);
  std::vector<double> predict(const FeatureMatrix& m) const;
  model::EvalReport evaluate(const FeatureMatrix& test_std,
                             double threshold = 0.5) const;

 private:
  nn::Network net_;
};

// One row of the comparison table; `source` distinguishes metrics computed
// here from externally supplied published numbers.
struct ComparisonRow {
  std::string name;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string source = "computed";  // or "external"
  bool proposed = false;
};

// Sorted descending by accuracy. Throws InvalidArgumentError on empty or
// duplicate model names.
std::vector<ComparisonRow> compare_models(std::vector<ComparisonRow> rows);
void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          const std::string& path);

}  // namespace phishlex::baselines
