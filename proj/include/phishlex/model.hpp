#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishlex/network.hpp"
#include "phishlex/types.hpp"

namespace phishlex::model {

// Architecture is fixed; only training hyperparameters vary.
struct ModelConfig {
  std::size_t input_len = kFeatureCount;
  std::uint64_t seed = 42;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  nn::AdamConfig adam{};
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct EpochStats {
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
};
using History = std::vector<EpochStats>;

// Metrics as percentages at full precision; format to 2 decimals for
// display. Undefined ratios (zero denominators) are reported as 0 with the
// corresponding flag cleared.
struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  double threshold = 0.5;
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;

  std::string formatted() const;  // "99.85 / 99.90 / 99.80 / 99.80"
  nlohmann::json to_json() const;
};

EvalReport report_from_confusion(long long tp, long long fp, long long tn,
                                 long long fn, double threshold);
EvalReport evaluate_probs(std::span<const double> probs,
                          std::span<const int> labels, double threshold);

// The 1D CNN with its normalization statistics and training history.
class PhishModel {
 public:
  static nn::Network make_network(const ModelConfig& cfg);
  // Seeded He-uniform init; gamma=1, beta=0, moving stats at (0, 1).
  static PhishModel build(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  nn::Network& network() { return net_; }
  const nn::Network& network() const { return net_; }
  nn::ParamCounts param_counts() { return net_.param_counts(); }

  const NormStats& norm_stats() const { return stats_; }
  void set_norm_stats(NormStats stats);
  const std::string& schema_version() const { return schema_version_; }

  History& history() { return history_; }
  const History& history() const { return history_; }

  // Inputs must be standardized with this model's NormStats.
  double predict_one(std::span<const double> x) const;
  std::vector<double> predict(const FeatureMatrix& m) const;
  EvalReport evaluate(const FeatureMatrix& m, double threshold = 0.5) const;

 private:
  PhishModel(ModelConfig cfg, nn::Network net);

  ModelConfig cfg_;
  nn::Network net_;
  NormStats stats_;
  std::string schema_version_;
  History history_;

  friend struct CheckpointCodec;
};

struct TrainResult {
  PhishModel best;   // highest test accuracy (earliest epoch on ties)
  PhishModel final;  // state after the last epoch
  std::size_t best_epoch = 0;  // 1-based
};

// Mini-batch training with per-epoch seeded shuffling. Records per-epoch
// train/test accuracy and loss (computed in infer mode after each epoch).
TrainResult train(const PhishModel& init, const FeatureMatrix& train_std,
                  const FeatureMatrix& test_std);

// Generic loop shared with the MLP baseline. `conv_input` selects between
// [N, len, 1] and [N, len] input batches.
struct TrainLoopConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  nn::AdamConfig adam{};
  bool conv_input = true;
  std::size_t input_len = kFeatureCount;
};

struct TrainLoopResult {
  History history;
  std::size_t best_epoch = 0;
  nn::Network best_net;
};

TrainLoopResult train_loop(nn::Network& net, const FeatureMatrix& train_std,
                           const FeatureMatrix& test_std, const TrainLoopConfig& cfg);

std::vector<double> infer_probs(const nn::Network& net, const FeatureMatrix& m,
                                bool conv_input, std::size_t input_len);

inline constexpr int kCheckpointVersion = 1;

// Versioned JSON container; round-trips every parameter bit-exactly.
void save_checkpoint(const PhishModel& model, const std::string& path);
PhishModel load_checkpoint(const std::string& path);
std::string checkpoint_checksum(const std::string& path);

// CSV with columns epoch, train_acc, test_acc, train_loss, test_loss.
void export_curves(const History& history, const std::string& path);

}  // namespace phishlex::model
