#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "phishlex/baselines.hpp"
#include "phishlex/data_pipeline.hpp"
#include "phishlex/url_features.hpp"
#include "test_helpers.hpp"

using namespace phishlex;
using namespace phishlex::baselines;
using testutil::TempDir;

namespace {

FeatureMatrix random_matrix(std::size_t rows, std::uint64_t seed) {
  FeatureMatrix m;
  m.schema_version = features::FeatureSchema::canonical().schema_version;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) m.values.push_back(norm(rng));
    m.labels.push_back(static_cast<int>(rng() % 2));
  }
  return m;
}

// Independent oracle: full distance table, explicit sort, explicit vote.
int knn_oracle(const FeatureMatrix& train, std::span<const double> x, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double diff = train.row(i)[j] - x[j];
      sum += diff * diff;
    }
    d.emplace_back(sum, i);
  }
  std::sort(d.begin(), d.end());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) pos += train.labels[d[i].second] == 1;
  if (2 * pos == k) return train.labels[d[0].second];
  return 2 * pos > k ? 1 : 0;
}

}  // namespace

TEST_CASE("knn recalls exact train points with k=1") {
  FeatureMatrix train = random_matrix(40, 1);
  KnnModel m = KnnModel::fit(train, 1);
  for (std::size_t i = 0; i < train.rows(); ++i) {
    CHECK(m.predict_one(train.row(i)) == train.labels[i]);
  }
}

TEST_CASE("knn majority vote and nearest-neighbor tie break") {
  FeatureMatrix train;
  train.schema_version = features::FeatureSchema::canonical().schema_version;
  auto add = [&](double x, int label) {
    std::array<double, kFeatureCount> row{};
    row[0] = x;
    train.values.insert(train.values.end(), row.begin(), row.end());
    train.labels.push_back(label);
  };
  add(0.0, 1);
  add(0.1, 1);
  add(0.2, 0);
  add(5.0, 0);
  std::array<double, kFeatureCount> q{};
  q[0] = 0.05;

  // k=3: two positives among the three nearest.
  KnnModel k3 = KnnModel::fit(train, 3);
  CHECK(k3.predict_one(q) == 1);

  // k=2: one vote each; the single nearest neighbor (x=0.0, label 1) wins.
  KnnModel k2 = KnnModel::fit(train, 2);
  CHECK(k2.predict_one(q) == 1);

  CHECK_THROWS_AS(KnnModel::fit(train, 5), KTooLargeError);
  CHECK_THROWS_AS(KnnModel::fit(train, 0), KTooLargeError);
  FeatureMatrix empty;
  empty.schema_version = train.schema_version;
  CHECK_THROWS_AS(KnnModel::fit(empty, 1), EmptyTrainSetError);
}

TEST_CASE("knn agrees with the brute-force oracle on 500 random points") {
  FeatureMatrix train = random_matrix(200, 2);
  FeatureMatrix queries = random_matrix(500, 3);
  for (std::size_t k : {1u, 5u}) {
    KnnModel m = KnnModel::fit(train, k);
    for (std::size_t i = 0; i < queries.rows(); ++i) {
      CHECK(m.predict_one(queries.row(i)) == knn_oracle(train, queries.row(i), k));
    }
  }
}

TEST_CASE("knn k=1 scores 100% train accuracy on deduplicated inputs") {
  FeatureMatrix train = random_matrix(150, 4);
  KnnModel m = KnnModel::fit(train, 1);
  model::EvalReport r = m.evaluate(train);
  CHECK(r.accuracy == 100.0);
}

TEST_CASE("knn prediction is invariant under a consistent feature permutation") {
  FeatureMatrix train = random_matrix(80, 6);
  FeatureMatrix queries = random_matrix(40, 7);

  std::vector<std::size_t> perm(kFeatureCount);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(8);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto permute = [&](const FeatureMatrix& m) {
    FeatureMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        out.row(i)[j] = m.row(i)[perm[j]];
      }
    }
    return out;
  };

  KnnModel base = KnnModel::fit(train, 5);
  KnnModel permuted = KnnModel::fit(permute(train), 5);
  FeatureMatrix pq = permute(queries);
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    CHECK(base.predict_one(queries.row(i)) == permuted.predict_one(pq.row(i)));
  }
}

TEST_CASE("mlp has exactly 1473 parameters and checks gradients") {
  MlpModel mlp(3);
  nn::ParamCounts c = mlp.param_counts();
  CHECK(c.total == 21 * 64 + 64 + 64 * 1 + 1);
  CHECK(c.total == 1473);
  CHECK(c.non_trainable == 0);

  nn::Network& net = mlp.network();
  std::mt19937_64 rng(31);
  nn::Tensor x = testutil::random_tensor({4, kFeatureCount}, rng);
  std::vector<double> y{1.0, 0.0, 1.0, 0.0};
  auto objective = [&]() {
    nn::Network probe = net;
    return nn::bce_loss(probe.forward(x, nn::Mode::kTrain).data, y);
  };
  net.zero_grads();
  const nn::Tensor out = net.forward(x, nn::Mode::kTrain);
  nn::Tensor grad(out.shape, nn::bce_grad(out.data, y));
  net.backward(grad);
  double worst = 0.0;
  for (auto& p : net.params()) {
    for (std::size_t i = 0; i < std::min<std::size_t>(p.value->numel(), 30); ++i) {
      worst = std::max(worst,
                       testutil::fd_rel_err(p.value->data[i], p.grad->data[i], objective));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("mlp trains deterministically and fits separable data") {
  FeatureMatrix all;
  all.schema_version = features::FeatureSchema::canonical().schema_version;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < 160; ++i) {
    const bool positive = i % 2 == 0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double v = noise(rng);
      if (j == 15) v = positive ? 5.0 + noise(rng) : -5.0 + noise(rng);
      all.values.push_back(v);
    }
    all.labels.push_back(positive ? 1 : 0);
  }
  data::MatrixSplitResult split = data::split_matrix(all, 0.8, 5);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);

  model::TrainLoopConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.seed = 13;

  MlpModel a(13), b(13);
  model::History ha = a.fit(std_r.train, std_r.test, cfg);
  model::History hb = b.fit(std_r.train, std_r.test, cfg);
  CHECK(ha.size() == cfg.epochs);
  CHECK(ha.back().train_acc >= 0.99);
  for (std::size_t i = 0; i < ha.size(); ++i) {
    CHECK(ha[i].train_loss == hb[i].train_loss);
  }
  model::EvalReport r = a.evaluate(std_r.test);
  CHECK(r.accuracy >= 90.0);
}

TEST_CASE("compare_models sorts, flags, validates, and accepts external rows") {
  std::vector<ComparisonRow> rows{
      {"CNN", 99.85, 99.90, 99.80, 99.80, "computed", true},
      {"KNN", 99.47, 99.79, 99.20, 99.49, "computed", false},
      {"RF", 99.12, 99.10, 98.88, 98.98, "external", false},
      {"MLP", 99.78, 99.72, 99.86, 99.79, "computed", false},
  };
  std::vector<ComparisonRow> sorted = compare_models(rows);
  CHECK(sorted[0].name == "CNN");
  CHECK(sorted[1].name == "MLP");
  CHECK(sorted[2].name == "KNN");
  CHECK(sorted[3].name == "RF");
  CHECK(sorted[3].source == "external");
  CHECK(sorted[3].accuracy == 99.12);

  CHECK_THROWS_AS(compare_models({}), InvalidArgumentError);
  CHECK_THROWS_AS(compare_models({{"", 1, 1, 1, 1, "computed", false}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(compare_models({{"A", 1, 1, 1, 1, "computed", false},
                                  {"A", 2, 2, 2, 2, "computed", false}}),
                  InvalidArgumentError);

  TempDir dir("cmp");
  write_comparison_csv(sorted, dir.file("table.csv"));
  const std::string text = testutil::read_text(dir.file("table.csv"));
  CHECK(text.rfind("model,accuracy,precision,recall,f1,source\n", 0) == 0);
  CHECK(text.find("CNN (proposed)") != std::string::npos);
}
