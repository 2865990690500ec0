#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishlex/layers.hpp"
#include "phishlex/tensor.hpp"

namespace phishlex::nn {

struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;  // null for non-trainable state
  bool trainable = true;
};

// A layer that can run over a batch. Conv/pool layers take [N, L, C];
// dense-side layers take [N, F]. `forward` caches whatever `backward`
// needs; `infer` is const and touches no caches so frozen models can be
// shared across threads.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual const char* kind() const = 0;
  virtual Tensor forward(const Tensor& x, Mode mode) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual Tensor infer(const Tensor& x) const = 0;
  virtual std::vector<ParamRef> params() { return {}; }
  virtual void init(std::mt19937_64&) {}
  virtual nlohmann::json hyper() const { return nlohmann::json::object(); }
};

class Conv1dLayer final : public Layer {
 public:
  Conv1dLayer(std::size_t in_channels, std::size_t filters, std::size_t kernel);
  const char* kind() const override { return "conv1d"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<ParamRef> params() override;
  void init(std::mt19937_64& rng) override;
  nlohmann::json hyper() const override;

 private:
  std::size_t in_channels_, filters_, kernel_;
  Tensor w_, b_, gw_, gb_;
  Tensor cached_x_;
};

class MaxPool1dLayer final : public Layer {
 public:
  explicit MaxPool1dLayer(std::size_t pool = 2) : pool_(pool) {}
  const char* kind() const override { return "maxpool1d"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  nlohmann::json hyper() const override;

 private:
  std::size_t pool_;
  std::size_t cached_len_ = 0;
  std::vector<std::uint32_t> argmax_;  // N * out_len * C
};

class GlobalAvgPool1dLayer final : public Layer {
 public:
  const char* kind() const override { return "gap1d"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;

 private:
  std::size_t cached_len_ = 0, cached_channels_ = 0;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t in, std::size_t units);
  const char* kind() const override { return "dense"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<ParamRef> params() override;
  void init(std::mt19937_64& rng) override;
  nlohmann::json hyper() const override;

 private:
  std::size_t in_, units_;
  Tensor w_, b_, gw_, gb_;
  Tensor cached_x_;
};

class BatchNormLayer final : public Layer {
 public:
  BatchNormLayer(std::size_t channels, double momentum = 0.9, double eps = 1e-5);
  const char* kind() const override { return "batchnorm"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<ParamRef> params() override;
  nlohmann::json hyper() const override;

 private:
  std::size_t channels_;
  Tensor gamma_, beta_, ggamma_, gbeta_;
  BatchNormState state_;
  BatchNormCache cache_;
};

class ReluLayer final : public Layer {
 public:
  const char* kind() const override { return "relu"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;

 private:
  Tensor cached_x_;
};

class SigmoidLayer final : public Layer {
 public:
  const char* kind() const override { return "sigmoid"; }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;

 private:
  Tensor cached_y_;
};

struct ParamCounts {
  std::size_t total = 0;
  std::size_t trainable = 0;
  std::size_t non_trainable = 0;
};

class Network {
 public:
  Network() = default;
  Network(const Network& other) { *this = other; }
  Network& operator=(const Network& other);
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

  void init(std::uint64_t seed);

  // Training-path passes; every intermediate is checked for finiteness.
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& grad_out);

  // Cache-free, thread-safe inference.
  Tensor infer(const Tensor& x) const;

  std::vector<ParamRef> params();
  void zero_grads();
  ParamCounts param_counts();

  nlohmann::json state_to_json();
  void state_from_json(const nlohmann::json& j);

  // Reconstructs a network from the checkpoint manifest.
  static Network from_manifest(const nlohmann::json& layers);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

std::unique_ptr<Layer> make_layer(const std::string& kind, const nlohmann::json& hyper);

}  // namespace phishlex::nn
