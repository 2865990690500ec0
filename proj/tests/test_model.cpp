#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <json.hpp>

#include "phishlex/data_pipeline.hpp"
#include "phishlex/model.hpp"
#include "phishlex/url_features.hpp"
#include "test_helpers.hpp"

using namespace phishlex;
using namespace phishlex::model;
using testutil::TempDir;

namespace {

// Two clusters separated by url_length (slot 15), the companion counts
// loosely correlated. Label = long URL.
FeatureMatrix synthetic_separable(std::size_t rows, std::uint64_t seed) {
  FeatureMatrix m;
  m.schema_version = features::FeatureSchema::canonical().schema_version;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 8.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const bool positive = i % 2 == 0;
    const double len = positive ? 90.0 + noise(rng) : 25.0 + noise(rng);
    std::array<double, kFeatureCount> row{};
    row[3] = std::floor(noise(rng) / 2.0) + 1;          // count_dot
    row[15] = std::floor(len);                          // url_length
    row[16] = std::floor(len / 4.0);                    // hostname_length
    row[19] = std::floor(noise(rng));                   // count_digits
    row[20] = std::floor(len * 0.7);                    // count_letters
    row[2] = 1.0;                                       // google_index stub
    for (double v : row) m.values.push_back(v);
    m.labels.push_back(positive ? 1 : 0);
  }
  return m;
}

PhishModel trained_small_model(FeatureMatrix& train_std, FeatureMatrix& test_std,
                               std::size_t epochs = 12) {
  FeatureMatrix all = synthetic_separable(240, 5);
  data::MatrixSplitResult split = data::split_matrix(all, 0.8, 9);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);
  train_std = std_r.train;
  test_std = std_r.test;
  ModelConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.seed = 77;
  PhishModel init = PhishModel::build(cfg);
  init.set_norm_stats(std_r.stats);
  TrainResult r = train(init, train_std, test_std);
  return std::move(r.best);
}

}  // namespace

TEST_CASE("parameter counts match the published architecture totals") {
  PhishModel m = PhishModel::build(ModelConfig{});
  nn::ParamCounts c = m.param_counts();
  CHECK(c.total == 10817);
  CHECK(c.trainable == 10689);
  CHECK(c.non_trainable == 128);
}

TEST_CASE("shape chain through the stack is (21,1) -> ... -> (1)") {
  PhishModel m = PhishModel::build(ModelConfig{});
  nn::Network& net = m.network();
  nn::Tensor x({1, 21, 1});
  const std::vector<std::vector<std::size_t>> expected = {
      {1, 19, 32},  // conv1d
      {1, 19, 32},  // relu
      {1, 9, 32},   // maxpool1d
      {1, 7, 64},   // conv1d
      {1, 7, 64},   // relu
      {1, 64},      // gap1d
      {1, 64},      // dense
      {1, 64},      // batchnorm
      {1, 64},      // relu
      {1, 1},       // dense
      {1, 1},       // sigmoid
  };
  for (std::size_t i = 0; i < net.size(); ++i) {
    x = net.layer(i).infer(x);
    CHECK(x.shape == expected[i]);
  }
}

TEST_CASE("build is deterministic under seed and yields a valid probability") {
  ModelConfig cfg;
  cfg.seed = 123;
  PhishModel a = PhishModel::build(cfg);
  PhishModel b = PhishModel::build(cfg);
  std::vector<double> zero(kFeatureCount, 0.0);
  const double pa = a.predict_one(zero);
  const double pb = b.predict_one(zero);
  CHECK(pa == pb);
  CHECK(pa > 0.0);
  CHECK(pa < 1.0);

  // Different seeds diverge on a non-trivial input (all biases start at
  // zero, so the zero vector maps to 0.5 for every seed).
  std::vector<double> probe(kFeatureCount, 0.0);
  for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = 0.1 * (i + 1);
  cfg.seed = 124;
  PhishModel c = PhishModel::build(cfg);
  CHECK(c.predict_one(probe) != a.predict_one(probe));
}

TEST_CASE("forward outputs stay finite for wild inputs and weights") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int trial = 0; trial < 5; ++trial) {
    ModelConfig cfg;
    cfg.seed = 1000 + trial;
    PhishModel m = PhishModel::build(cfg);
    nn::Tensor x({4, 21, 1});
    for (double& v : x.data) v = dist(rng);
    const nn::Tensor out_infer = m.network().infer(x);
    CHECK(out_infer.all_finite());
    const nn::Tensor out_train = m.network().forward(x, nn::Mode::kTrain);
    CHECK(out_train.all_finite());
  }
}

TEST_CASE("training fits a linearly separable synthetic set") {
  FeatureMatrix all = synthetic_separable(200, 3);
  data::MatrixSplitResult split = data::split_matrix(all, 0.8, 3);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);

  ModelConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 16;
  cfg.seed = 42;
  PhishModel init = PhishModel::build(cfg);
  init.set_norm_stats(std_r.stats);
  TrainResult r = train(init, std_r.train, std_r.test);

  CHECK(r.final.history().size() == cfg.epochs);
  CHECK(r.final.history().back().train_acc >= 0.99);
  // Coarse loss sanity, not per-step monotonicity.
  CHECK(r.final.history()[29].train_loss < r.final.history()[0].train_loss);
  CHECK(r.best_epoch >= 1);
  CHECK(r.best_epoch <= cfg.epochs);
}

TEST_CASE("training is deterministic given data, seed, and config") {
  FeatureMatrix all = synthetic_separable(120, 8);
  data::MatrixSplitResult split = data::split_matrix(all, 0.8, 4);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);

  ModelConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 16;
  cfg.seed = 11;
  auto run = [&]() {
    PhishModel init = PhishModel::build(cfg);
    init.set_norm_stats(std_r.stats);
    return train(init, std_r.train, std_r.test);
  };
  TrainResult a = run();
  TrainResult b = run();
  REQUIRE(a.final.history().size() == b.final.history().size());
  for (std::size_t i = 0; i < a.final.history().size(); ++i) {
    CHECK(a.final.history()[i].train_loss == b.final.history()[i].train_loss);
    CHECK(a.final.history()[i].test_acc == b.final.history()[i].test_acc);
  }
  const std::vector<double> pa = a.best.predict(std_r.test);
  const std::vector<double> pb = b.best.predict(std_r.test);
  CHECK(pa == pb);
}

TEST_CASE("training aborts with NonFiniteLoss context on poisoned weights") {
  FeatureMatrix all = synthetic_separable(64, 2);
  data::MatrixSplitResult split = data::split_matrix(all, 0.8, 2);
  data::StandardizeResult std_r = data::standardize(split.train, split.test);

  ModelConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  PhishModel init = PhishModel::build(cfg);
  init.set_norm_stats(std_r.stats);
  init.network().params()[0].value->data[0] =
      std::numeric_limits<double>::quiet_NaN();
  try {
    train(init, std_r.train, std_r.test);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("predict: batch equals mapped single predictions, single sample ok") {
  FeatureMatrix train_std, test_std;
  PhishModel m = trained_small_model(train_std, test_std, 3);

  const std::vector<double> batch = m.predict(test_std);
  for (std::size_t i = 0; i < test_std.rows(); ++i) {
    CHECK(batch[i] == m.predict_one(test_std.row(i)));
  }

  std::vector<double> wrong(kFeatureCount - 1, 0.0);
  CHECK_THROWS_AS(m.predict_one(wrong), SchemaMismatchError);
}

TEST_CASE("evaluate reproduces hand-computed metrics") {
  EvalReport r = report_from_confusion(40, 5, 50, 5, 0.5);
  CHECK(r.accuracy == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(r.precision == doctest::Approx(100.0 * 40.0 / 45.0).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(100.0 * 40.0 / 45.0).epsilon(1e-12));
  CHECK(r.formatted() == "90.00 / 88.89 / 88.89 / 88.89");

  // f1 identity against the report's own precision/recall.
  const double f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  CHECK(std::abs(r.f1 - f1) < 1e-9);

  EvalReport perfect = report_from_confusion(10, 0, 10, 0, 0.5);
  CHECK(perfect.accuracy == 100.0);
  CHECK(perfect.precision == 100.0);
  CHECK(perfect.recall == 100.0);
  CHECK(perfect.f1 == 100.0);

  // Undefined ratios come back as flagged zeros.
  EvalReport none = report_from_confusion(0, 0, 10, 5, 0.5);
  CHECK_FALSE(none.precision_defined);
  CHECK(none.precision == 0.0);

  std::vector<double> probs{0.9, 0.2};
  std::vector<int> labels{1, 0};
  EvalReport ok = evaluate_probs(probs, labels, 0.5);
  CHECK(ok.tp == 1);
  CHECK(ok.tn == 1);

  FeatureMatrix empty;
  empty.schema_version = features::FeatureSchema::canonical().schema_version;
  PhishModel m = PhishModel::build(ModelConfig{});
  CHECK_THROWS_AS(m.evaluate(empty), EmptyTestSetError);
}

TEST_CASE("checkpoint round-trip preserves predictions bit-for-bit") {
  TempDir dir("ckpt");
  FeatureMatrix train_std, test_std;
  PhishModel m = trained_small_model(train_std, test_std, 3);
  const std::string path = dir.file("model.ckpt.json");
  save_checkpoint(m, path);
  PhishModel back = load_checkpoint(path);

  std::mt19937_64 rng(71);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(kFeatureCount);
    for (double& v : x) v = norm(rng);
    CHECK(m.predict_one(x) == back.predict_one(x));
  }
  CHECK(back.norm_stats().mean == m.norm_stats().mean);
  CHECK(back.history().size() == m.history().size());
  CHECK(back.config().seed == m.config().seed);

  // Saving the reloaded model reproduces the same bytes (and checksum).
  const std::string path2 = dir.file("model2.ckpt.json");
  save_checkpoint(back, path2);
  CHECK(testutil::read_text(path) == testutil::read_text(path2));
}

TEST_CASE("checkpoint rejects truncation and version drift") {
  TempDir dir("ckptbad");
  FeatureMatrix train_std, test_std;
  PhishModel m = trained_small_model(train_std, test_std, 2);
  const std::string path = dir.file("model.ckpt.json");
  save_checkpoint(m, path);

  const std::string full = testutil::read_text(path);
  testutil::write_text(dir.file("trunc.json"), full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(dir.file("trunc.json")), CorruptChecksumError);

  nlohmann::json doc = nlohmann::json::parse(full);
  doc["version"] = 0;
  testutil::write_text(dir.file("old.json"), doc.dump());
  try {
    load_checkpoint(dir.file("old.json"));
    FAIL("expected VersionMismatchError");
  } catch (const VersionMismatchError& e) {
    const std::string what = e.what();
    CHECK(what.find("0") != std::string::npos);
    CHECK(what.find("1") != std::string::npos);
  }

  // Tampered payload fails the checksum.
  nlohmann::json doc2 = nlohmann::json::parse(full);
  doc2["body"]["schema_version"] = "tampered";
  testutil::write_text(dir.file("tampered.json"), doc2.dump());
  CHECK_THROWS_AS(load_checkpoint(dir.file("tampered.json")), CorruptChecksumError);

  CHECK_THROWS_AS(load_checkpoint(dir.file("absent.json")), IoError);
}

TEST_CASE("export_curves emits one line per epoch plus header, bit-exact") {
  TempDir dir("curves");
  History h;
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 50; ++i) h.push_back({dist(rng), dist(rng), dist(rng), dist(rng)});
  const std::string path = dir.file("curves.csv");
  export_curves(h, path);

  const std::string text = testutil::read_text(path);
  const auto lines = static_cast<std::size_t>(
      std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == 51);

  // Parse back and compare exactly.
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,train_acc,test_acc,train_loss,test_loss");
  for (int i = 0; i < 50; ++i) {
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    CHECK(std::stoi(field) == i + 1);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == h[i].train_acc);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == h[i].test_acc);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == h[i].train_loss);
    std::getline(row, field, ',');
    CHECK(std::stod(field) == h[i].test_loss);
  }

  CHECK_THROWS_AS(export_curves(History{}, dir.file("empty.csv")),
                  InvalidArgumentError);
}

TEST_CASE("end-to-end gradient check through the full stack") {
  ModelConfig cfg;
  cfg.seed = 202;
  PhishModel m = PhishModel::build(cfg);
  nn::Network& net = m.network();

  std::mt19937_64 rng(202);
  nn::Tensor x = testutil::random_tensor({3, 21, 1}, rng);
  std::vector<double> y{1.0, 0.0, 1.0};

  auto objective = [&]() {
    nn::Network probe = net;  // fresh caches/statistics per evaluation
    const nn::Tensor out = probe.forward(x, nn::Mode::kTrain);
    return nn::bce_loss(out.data, y);
  };

  net.zero_grads();
  const nn::Tensor out = net.forward(x, nn::Mode::kTrain);
  nn::Tensor grad(out.shape, nn::bce_grad(out.data, y));
  net.backward(grad);

  // Sampled parameter coordinates across every trainable tensor.
  double worst = 0.0;
  for (auto& p : net.params()) {
    if (!p.trainable) continue;
    std::uniform_int_distribution<std::size_t> pick(0, p.value->numel() - 1);
    for (int k = 0; k < 6; ++k) {
      const std::size_t i = pick(rng);
      worst = std::max(
          worst, testutil::fd_rel_err(p.value->data[i], p.grad->data[i], objective));
    }
  }
  CHECK(worst < 1e-3);
}
