#include "phishlex/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "phishlex/csv.hpp"
#include "phishlex/util.hpp"

namespace phishlex::baselines {

// ---------------------------------------------------------------------------
// KNN
// ---------------------------------------------------------------------------

KnnModel KnnModel::fit(const FeatureMatrix& train_std, std::size_t k) {
  train_std.check_consistent();
  if (train_std.rows() == 0) throw EmptyTrainSetError("knn: empty training set");
  if (k < 1 || k > train_std.rows()) {
    throw KTooLargeError("knn: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(train_std.rows()) + "]");
  }
  KnnModel m;
  m.train_ = train_std;
  m.k_ = k;
  return m;
}

int KnnModel::predict_one(std::span<const double> x) const {
  if (x.size() != kFeatureCount) {
    throw SchemaMismatchError("knn: query has wrong dimensionality");
  }
  // (distance^2, index); index breaks distance ties deterministically.
  std::vector<std::pair<double, std::size_t>> dist(train_.rows());
  for (std::size_t i = 0; i < train_.rows(); ++i) {
    const auto row = train_.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double d = row[j] - x[j];
      d2 += d * d;
    }
    dist[i] = {d2, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());

  std::size_t votes = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    votes += train_.labels[dist[i].second] == 1 ? 1 : 0;
  }
  if (2 * votes == k_) return train_.labels[dist[0].second];  // tie
  return 2 * votes > k_ ? 1 : 0;
}

std::vector<int> KnnModel::predict(const FeatureMatrix& m) const {
  m.check_consistent();
  std::vector<int> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = predict_one(m.row(i));
  return out;
}

model::EvalReport KnnModel::evaluate(const FeatureMatrix& test_std,
                                     double threshold) const {
  if (test_std.rows() == 0) throw EmptyTestSetError("knn: empty test set");
  const std::vector<int> preds = predict(test_std);
  std::vector<double> probs(preds.begin(), preds.end());
  return model::evaluate_probs(probs, test_std.labels, threshold);
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

MlpModel::MlpModel(std::uint64_t seed) {
  net_.add(std::make_unique<nn::DenseLayer>(kFeatureCount, 64));
  net_.add(std::make_unique<nn::ReluLayer>());
  net_.add(std::make_unique<nn::DenseLayer>(64, 1));
  net_.add(std::make_unique<nn::SigmoidLayer>());
  net_.init(seed);
}

model::History MlpModel::fit(const FeatureMatrix& train_std,
                             const FeatureMatrix& test_std,
                             const model::TrainLoopConfig& cfg) {
  model::TrainLoopConfig loop = cfg;
  loop.conv_input = false;
  loop.input_len = kFeatureCount;
  model::TrainLoopResult r = model::train_loop(net_, train_std, test_std, loop);
  net_ = r.best_net;
  return r.history;
}

std::vector<double> MlpModel::predict(const FeatureMatrix& m) const {
  m.check_consistent();
  return model::infer_probs(net_, m, /*conv_input=*/false, kFeatureCount);
}

model::EvalReport MlpModel::evaluate(const FeatureMatrix& test_std,
                                     double threshold) const {
  if (test_std.rows() == 0) throw EmptyTestSetError("mlp: empty test set");
  return model::evaluate_probs(predict(test_std), test_std.labels, threshold);
}

// ---------------------------------------------------------------------------
// Comparison table
// ---------------------------------------------------------------------------

std::vector<ComparisonRow> compare_models(std::vector<ComparisonRow> rows) {
  if (rows.empty()) throw InvalidArgumentError("comparison needs at least one row");
  std::set<std::string> seen;
  for (const auto& row : rows) {
    if (row.name.empty()) throw InvalidArgumentError("comparison row with empty name");
    if (!seen.insert(row.name).second) {
      throw InvalidArgumentError("duplicate model name: " + row.name);
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.accuracy > b.accuracy;
                   });
  return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << "model,accuracy,precision,recall,f1,source\n";
  for (const auto& row : rows) {
    std::vector<std::string> fields{
        row.proposed ? row.name + " (proposed)" : row.name,
        util::format_double(row.accuracy), util::format_double(row.precision),
        util::format_double(row.recall),   util::format_double(row.f1),
        row.source};
    csvio::write_row(out, fields);
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace phishlex::baselines
