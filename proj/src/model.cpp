#include "phishlex/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "phishlex/util.hpp"

namespace phishlex::model {

namespace {

constexpr const char* kCheckpointMagic = "PHISHLEXCKPT";
constexpr std::uint64_t kShuffleSalt = 0x7368756666ULL;

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nn::Tensor rows_to_batch(const FeatureMatrix& m, std::span<const std::size_t> idx,
                         bool conv_input, std::size_t input_len) {
  nn::Tensor x(conv_input ? std::vector<std::size_t>{idx.size(), input_len, 1}
                          : std::vector<std::size_t>{idx.size(), input_len});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto row = m.row(idx[i]);
    std::copy(row.begin(), row.end(), x.data.begin() + i * input_len);
  }
  return x;
}

struct SetMetrics {
  double loss = 0.0;
  double acc = 0.0;
};

SetMetrics infer_metrics(const nn::Network& net, const FeatureMatrix& m,
                         bool conv_input, std::size_t input_len) {
  const std::vector<double> probs = infer_probs(net, m, conv_input, input_len);
  std::vector<double> y(m.labels.begin(), m.labels.end());
  SetMetrics metrics;
  metrics.loss = nn::bce_loss(probs, y);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= 0.5 ? 1 : 0;
    if (pred == m.labels[i]) ++correct;
  }
  metrics.acc = static_cast<double>(correct) / static_cast<double>(probs.size());
  return metrics;
}

}  // namespace

std::vector<double> infer_probs(const nn::Network& net, const FeatureMatrix& m,
                                bool conv_input, std::size_t input_len) {
  // Chunked to bound the size of intermediate activations.
  constexpr std::size_t kChunk = 512;
  std::vector<double> probs;
  probs.reserve(m.rows());
  for (std::size_t start = 0; start < m.rows(); start += kChunk) {
    const std::size_t n = std::min(kChunk, m.rows() - start);
    nn::Tensor x(conv_input ? std::vector<std::size_t>{n, input_len, 1}
                            : std::vector<std::size_t>{n, input_len});
    std::copy(m.values.begin() + start * input_len,
              m.values.begin() + (start + n) * input_len, x.data.begin());
    const nn::Tensor out = net.infer(x);
    probs.insert(probs.end(), out.data.begin(), out.data.end());
  }
  return probs;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

nlohmann::json ModelConfig::to_json() const {
  return {{"input_len", input_len},
          {"seed", seed},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"lr", adam.lr},
          {"beta1", adam.beta1},
          {"beta2", adam.beta2},
          {"adam_eps", adam.eps},
          {"bn_momentum", bn_momentum},
          {"bn_eps", bn_eps}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.input_len = j.at("input_len").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.adam.lr = j.at("lr").get<double>();
  cfg.adam.beta1 = j.at("beta1").get<double>();
  cfg.adam.beta2 = j.at("beta2").get<double>();
  cfg.adam.eps = j.at("adam_eps").get<double>();
  cfg.bn_momentum = j.at("bn_momentum").get<double>();
  cfg.bn_eps = j.at("bn_eps").get<double>();
  return cfg;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

std::string EvalReport::formatted() const {
  return two_decimals(accuracy) + " / " + two_decimals(precision) + " / " +
         two_decimals(recall) + " / " + two_decimals(f1);
}

nlohmann::json EvalReport::to_json() const {
  return {{"accuracy", accuracy},
          {"precision", precision},
          {"recall", recall},
          {"f1", f1},
          {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}},
          {"threshold", threshold},
          {"precision_defined", precision_defined},
          {"recall_defined", recall_defined},
          {"f1_defined", f1_defined},
          {"formatted", formatted()}};
}

EvalReport report_from_confusion(long long tp, long long fp, long long tn,
                                 long long fn, double threshold) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.threshold = threshold;
  const double n = static_cast<double>(tp + fp + tn + fn);
  if (n <= 0) throw EmptyTestSetError("confusion matrix is empty");
  r.accuracy = 100.0 * static_cast<double>(tp + tn) / n;
  if (tp + fp > 0) {
    r.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    r.precision_defined = false;
  }
  if (tp + fn > 0) {
    r.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    r.recall_defined = false;
  }
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1_defined = false;
  }
  return r;
}

EvalReport evaluate_probs(std::span<const double> probs, std::span<const int> labels,
                          double threshold) {
  if (probs.size() != labels.size()) {
    throw ShapeMismatchError("probability/label count mismatch");
  }
  if (probs.empty()) throw EmptyTestSetError("no samples to evaluate");
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= threshold ? 1 : 0;
    if (pred == 1 && labels[i] == 1) ++tp;
    else if (pred == 1 && labels[i] == 0) ++fp;
    else if (pred == 0 && labels[i] == 0) ++tn;
    else ++fn;
  }
  return report_from_confusion(tp, fp, tn, fn, threshold);
}

// ---------------------------------------------------------------------------
// PhishModel
// ---------------------------------------------------------------------------

PhishModel::PhishModel(ModelConfig cfg, nn::Network net)
    : cfg_(cfg), net_(std::move(net)) {}

nn::Network PhishModel::make_network(const ModelConfig& cfg) {
  nn::Network net;
  net.add(std::make_unique<nn::Conv1dLayer>(1, 32, 3));
  net.add(std::make_unique<nn::ReluLayer>());
  net.add(std::make_unique<nn::MaxPool1dLayer>(2));
  net.add(std::make_unique<nn::Conv1dLayer>(32, 64, 3));
  net.add(std::make_unique<nn::ReluLayer>());
  net.add(std::make_unique<nn::GlobalAvgPool1dLayer>());
  net.add(std::make_unique<nn::DenseLayer>(64, 64));
  net.add(std::make_unique<nn::BatchNormLayer>(64, cfg.bn_momentum, cfg.bn_eps));
  net.add(std::make_unique<nn::ReluLayer>());
  net.add(std::make_unique<nn::DenseLayer>(64, 1));
  net.add(std::make_unique<nn::SigmoidLayer>());
  return net;
}

PhishModel PhishModel::build(const ModelConfig& cfg) {
  nn::Network net = make_network(cfg);
  net.init(cfg.seed);
  return PhishModel(cfg, std::move(net));
}

void PhishModel::set_norm_stats(NormStats stats) {
  schema_version_ = stats.schema_version;
  stats_ = std::move(stats);
}

double PhishModel::predict_one(std::span<const double> x) const {
  if (x.size() != cfg_.input_len) {
    throw SchemaMismatchError("expected " + std::to_string(cfg_.input_len) +
                              " features, got " + std::to_string(x.size()));
  }
  nn::Tensor in({1, cfg_.input_len, 1});
  std::copy(x.begin(), x.end(), in.data.begin());
  return net_.infer(in).data[0];
}

std::vector<double> PhishModel::predict(const FeatureMatrix& m) const {
  m.check_consistent();
  if (!schema_version_.empty() && m.schema_version != schema_version_) {
    throw SchemaMismatchError("matrix schema " + m.schema_version +
                              " does not match model schema " + schema_version_);
  }
  return infer_probs(net_, m, /*conv_input=*/true, cfg_.input_len);
}

EvalReport PhishModel::evaluate(const FeatureMatrix& m, double threshold) const {
  if (m.rows() == 0) throw EmptyTestSetError("test matrix is empty");
  const std::vector<double> probs = predict(m);
  return evaluate_probs(probs, m.labels, threshold);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

TrainLoopResult train_loop(nn::Network& net, const FeatureMatrix& train_std,
                           const FeatureMatrix& test_std,
                           const TrainLoopConfig& cfg) {
  train_std.check_consistent();
  test_std.check_consistent();
  if (train_std.schema_version != test_std.schema_version) {
    throw SchemaMismatchError("train/test schema versions differ");
  }
  if (train_std.rows() < 2) throw TooFewSamplesError("need at least 2 training rows");

  std::vector<nn::ParamRef> params = net.params();
  std::vector<nn::AdamMoments> moments;
  for (const auto& p : params) {
    if (p.trainable) moments.emplace_back(p.value->shape);
  }

  std::mt19937_64 shuffle_rng(util::derive_seed(cfg.seed, kShuffleSalt));
  std::vector<std::size_t> order(train_std.rows());
  std::iota(order.begin(), order.end(), 0);

  TrainLoopResult result;
  result.best_net = net;
  double best_acc = -1.0;
  long step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      if (n < 2) continue;  // batchnorm train mode needs at least 2 samples
      const std::span<const std::size_t> idx(order.data() + start, n);
      nn::Tensor x = rows_to_batch(train_std, idx, cfg.conv_input, cfg.input_len);
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<double>(train_std.labels[idx[i]]);
      }

      try {
        net.zero_grads();
        const nn::Tensor out = net.forward(x, nn::Mode::kTrain);
        const double loss = nn::bce_loss(out.data, y);
        if (!std::isfinite(loss)) throw NonFiniteError("loss is not finite");
        nn::Tensor grad(out.shape, nn::bce_grad(out.data, y));
        net.backward(grad);
        ++step;
        std::size_t mi = 0;
        for (auto& p : params) {
          if (!p.trainable) continue;
          nn::adam_step(*p.value, *p.grad, moments[mi++], step, cfg.adam);
        }
      } catch (const NonFiniteError& e) {
        std::ostringstream msg;
        msg << "training aborted at epoch " << (epoch + 1) << ", batch "
            << (start / cfg.batch_size + 1) << ": " << e.what();
        throw NonFiniteError(msg.str());
      }
    }

    const SetMetrics train_m =
        infer_metrics(net, train_std, cfg.conv_input, cfg.input_len);
    const SetMetrics test_m =
        infer_metrics(net, test_std, cfg.conv_input, cfg.input_len);
    result.history.push_back({train_m.loss, train_m.acc, test_m.loss, test_m.acc});

    if (test_m.acc > best_acc) {
      best_acc = test_m.acc;
      result.best_epoch = epoch + 1;
      result.best_net = net;
    }
  }
  return result;
}

TrainResult train(const PhishModel& init, const FeatureMatrix& train_std,
                  const FeatureMatrix& test_std) {
  const ModelConfig& cfg = init.config();
  if (!init.schema_version().empty() &&
      train_std.schema_version != init.schema_version()) {
    throw SchemaMismatchError("training data schema does not match model schema");
  }

  PhishModel model = init;
  TrainLoopConfig loop{cfg.epochs, cfg.batch_size, cfg.seed, cfg.adam,
                       /*conv_input=*/true, cfg.input_len};
  TrainLoopResult r = train_loop(model.network(), train_std, test_std, loop);

  model.history() = r.history;
  PhishModel best = model;
  best.network() = r.best_net;
  return {std::move(best), std::move(model), r.best_epoch};
}

// ---------------------------------------------------------------------------
// Checkpoint I/O
// ---------------------------------------------------------------------------

namespace {

nlohmann::json history_to_json(const History& h) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : h) {
    arr.push_back({{"train_loss", e.train_loss},
                   {"train_acc", e.train_acc},
                   {"test_loss", e.test_loss},
                   {"test_acc", e.test_acc}});
  }
  return arr;
}

History history_from_json(const nlohmann::json& arr) {
  History h;
  for (const auto& e : arr) {
    h.push_back({e.at("train_loss").get<double>(), e.at("train_acc").get<double>(),
                 e.at("test_loss").get<double>(), e.at("test_acc").get<double>()});
  }
  return h;
}

}  // namespace

struct CheckpointCodec {
  static nlohmann::json body(const PhishModel& model) {
    auto& m = const_cast<PhishModel&>(model);
    nlohmann::json stats{{"mean", model.norm_stats().mean},
                         {"std", model.norm_stats().std},
                         {"computed_on", model.norm_stats().computed_on}};
    return nlohmann::json{{"config", model.config().to_json()},
                          {"schema_version", model.schema_version()},
                          {"norm_stats", stats},
                          {"layers", m.network().state_to_json()},
                          {"history", history_to_json(model.history())}};
  }

  static PhishModel decode(const nlohmann::json& body) {
    const ModelConfig cfg = ModelConfig::from_json(body.at("config"));
    nn::Network net = nn::Network::from_manifest(body.at("layers"));
    net.state_from_json(body.at("layers"));
    PhishModel model(cfg, std::move(net));
    NormStats stats;
    stats.schema_version = body.at("schema_version").get<std::string>();
    stats.mean = body.at("norm_stats").at("mean").get<std::vector<double>>();
    stats.std = body.at("norm_stats").at("std").get<std::vector<double>>();
    stats.computed_on = body.at("norm_stats").value("computed_on", "train_only");
    model.set_norm_stats(std::move(stats));
    model.history() = history_from_json(body.at("history"));
    return model;
  }
};

void save_checkpoint(const PhishModel& model, const std::string& path) {
  nlohmann::json body = CheckpointCodec::body(model);
  nlohmann::json file{{"magic", kCheckpointMagic},
                      {"version", kCheckpointVersion},
                      {"checksum", util::to_hex(util::fnv1a64(body.dump()))},
                      {"body", std::move(body)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << file.dump() << '\n';
  if (!out) throw IoError("checkpoint write failed: " + path);
}

PhishModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  nlohmann::json file;
  try {
    in >> file;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptChecksumError(std::string("checkpoint is unreadable: ") + e.what());
  }
  if (!file.is_object() || file.value("magic", "") != kCheckpointMagic) {
    throw CorruptChecksumError("not a checkpoint file: " + path);
  }
  const int version = file.value("version", -1);
  if (version != kCheckpointVersion) {
    throw VersionMismatchError("checkpoint version " + std::to_string(version) +
                               ", this build supports version " +
                               std::to_string(kCheckpointVersion));
  }
  if (!file.contains("body") || !file.contains("checksum")) {
    throw CorruptChecksumError("checkpoint missing body or checksum: " + path);
  }
  const std::string expected = file.at("checksum").get<std::string>();
  const std::string actual = util::to_hex(util::fnv1a64(file.at("body").dump()));
  if (expected != actual) {
    throw CorruptChecksumError("checkpoint checksum mismatch: expected " + expected +
                               ", got " + actual);
  }
  return CheckpointCodec::decode(file.at("body"));
}

std::string checkpoint_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  nlohmann::json file;
  try {
    in >> file;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptChecksumError(std::string("checkpoint is unreadable: ") + e.what());
  }
  return file.at("checksum").get<std::string>();
}

// ---------------------------------------------------------------------------
// Curves export
// ---------------------------------------------------------------------------

void export_curves(const History& history, const std::string& path) {
  if (history.empty()) throw InvalidArgumentError("history is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << "epoch,train_acc,test_acc,train_loss,test_loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << (i + 1) << ',' << util::format_double(history[i].train_acc) << ','
        << util::format_double(history[i].test_acc) << ','
        << util::format_double(history[i].train_loss) << ','
        << util::format_double(history[i].test_loss) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace phishlex::model
