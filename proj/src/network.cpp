#include "phishlex/network.hpp"

#include <cmath>

namespace phishlex::nn {

namespace {

// He-uniform over [-limit, limit] with limit = sqrt(6 / fan_in).
void he_uniform(Tensor& t, std::size_t fan_in, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.data) v = dist(rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv1dLayer
// ---------------------------------------------------------------------------

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t filters,
                         std::size_t kernel)
    : in_channels_(in_channels),
      filters_(filters),
      kernel_(kernel),
      w_({kernel, in_channels, filters}),
      b_({filters}),
      gw_({kernel, in_channels, filters}),
      gb_({filters}) {}

Tensor Conv1dLayer::forward(const Tensor& x, Mode) {
  cached_x_ = x;
  return infer(x);
}

Tensor Conv1dLayer::infer(const Tensor& x) const {
  require_rank(x, 3, "conv1d batch input");
  const std::size_t n = x.dim(0), len = x.dim(1);
  if (x.dim(2) != in_channels_ || len < kernel_) {
    throw ShapeMismatchError("conv1d: batch input does not match layer");
  }
  const std::size_t out_len = len - kernel_ + 1;
  Tensor y({n, out_len, filters_});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::conv1d_forward(x.data.data() + i * len * in_channels_, w_.data.data(),
                           b_.data.data(), y.data.data() + i * out_len * filters_,
                           len, in_channels_, kernel_, filters_);
  }
  return y;
}

Tensor Conv1dLayer::backward(const Tensor& grad_out) {
  const std::size_t n = cached_x_.dim(0), len = cached_x_.dim(1);
  const std::size_t out_len = len - kernel_ + 1;
  require_shape(grad_out, {n, out_len, filters_}, "conv1d grad_out");
  Tensor grad_x(cached_x_.shape);
  for (std::size_t i = 0; i < n; ++i) {
    kernel::conv1d_backward(grad_out.data.data() + i * out_len * filters_,
                            cached_x_.data.data() + i * len * in_channels_,
                            w_.data.data(), grad_x.data.data() + i * len * in_channels_,
                            gw_.data.data(), gb_.data.data(), len, in_channels_,
                            kernel_, filters_);
  }
  return grad_x;
}

std::vector<ParamRef> Conv1dLayer::params() {
  return {{"w", &w_, &gw_, true}, {"b", &b_, &gb_, true}};
}

void Conv1dLayer::init(std::mt19937_64& rng) {
  he_uniform(w_, kernel_ * in_channels_, rng);
  b_.fill(0.0);
}

nlohmann::json Conv1dLayer::hyper() const {
  return {{"in_channels", in_channels_}, {"filters", filters_}, {"kernel", kernel_}};
}

// ---------------------------------------------------------------------------
// MaxPool1dLayer
// ---------------------------------------------------------------------------

Tensor MaxPool1dLayer::forward(const Tensor& x, Mode) {
  require_rank(x, 3, "maxpool1d batch input");
  const std::size_t n = x.dim(0), len = x.dim(1), channels = x.dim(2);
  cached_len_ = len;
  const std::size_t out_len = len / pool_;
  argmax_.assign(n * out_len * channels, 0);
  Tensor y({n, out_len, channels});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::maxpool1d_forward(x.data.data() + i * len * channels,
                              y.data.data() + i * out_len * channels,
                              argmax_.data() + i * out_len * channels, len, channels,
                              pool_);
  }
  return y;
}

Tensor MaxPool1dLayer::infer(const Tensor& x) const {
  require_rank(x, 3, "maxpool1d batch input");
  const std::size_t n = x.dim(0), len = x.dim(1), channels = x.dim(2);
  const std::size_t out_len = len / pool_;
  Tensor y({n, out_len, channels});
  std::vector<std::uint32_t> scratch(out_len * channels);
  for (std::size_t i = 0; i < n; ++i) {
    kernel::maxpool1d_forward(x.data.data() + i * len * channels,
                              y.data.data() + i * out_len * channels, scratch.data(),
                              len, channels, pool_);
  }
  return y;
}

Tensor MaxPool1dLayer::backward(const Tensor& grad_out) {
  const std::size_t n = grad_out.dim(0), out_len = grad_out.dim(1),
                    channels = grad_out.dim(2);
  Tensor grad_x({n, cached_len_, channels});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::maxpool1d_backward(grad_out.data.data() + i * out_len * channels,
                               argmax_.data() + i * out_len * channels,
                               grad_x.data.data() + i * cached_len_ * channels,
                               cached_len_, channels, pool_);
  }
  return grad_x;
}

nlohmann::json MaxPool1dLayer::hyper() const { return {{"pool", pool_}}; }

// ---------------------------------------------------------------------------
// GlobalAvgPool1dLayer
// ---------------------------------------------------------------------------

Tensor GlobalAvgPool1dLayer::forward(const Tensor& x, Mode) {
  cached_len_ = x.dim(1);
  cached_channels_ = x.dim(2);
  return infer(x);
}

Tensor GlobalAvgPool1dLayer::infer(const Tensor& x) const {
  require_rank(x, 3, "gap1d batch input");
  const std::size_t n = x.dim(0), len = x.dim(1), channels = x.dim(2);
  Tensor y({n, channels});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::gap1d_forward(x.data.data() + i * len * channels,
                          y.data.data() + i * channels, len, channels);
  }
  return y;
}

Tensor GlobalAvgPool1dLayer::backward(const Tensor& grad_out) {
  const std::size_t n = grad_out.dim(0);
  Tensor grad_x({n, cached_len_, cached_channels_});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::gap1d_backward(grad_out.data.data() + i * cached_channels_,
                           grad_x.data.data() + i * cached_len_ * cached_channels_,
                           cached_len_, cached_channels_);
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// DenseLayer
// ---------------------------------------------------------------------------

DenseLayer::DenseLayer(std::size_t in, std::size_t units)
    : in_(in), units_(units), w_({in, units}), b_({units}), gw_({in, units}),
      gb_({units}) {}

Tensor DenseLayer::forward(const Tensor& x, Mode) {
  cached_x_ = x;
  return infer(x);
}

Tensor DenseLayer::infer(const Tensor& x) const {
  require_rank(x, 2, "dense batch input");
  if (x.dim(1) != in_) throw ShapeMismatchError("dense: batch input does not match layer");
  const std::size_t n = x.dim(0);
  Tensor y({n, units_});
  for (std::size_t i = 0; i < n; ++i) {
    kernel::dense_forward(x.data.data() + i * in_, w_.data.data(), b_.data.data(),
                          y.data.data() + i * units_, in_, units_);
  }
  return y;
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
  const std::size_t n = cached_x_.dim(0);
  require_shape(grad_out, {n, units_}, "dense grad_out");
  Tensor grad_x(cached_x_.shape);
  for (std::size_t i = 0; i < n; ++i) {
    kernel::dense_backward(grad_out.data.data() + i * units_,
                           cached_x_.data.data() + i * in_, w_.data.data(),
                           grad_x.data.data() + i * in_, gw_.data.data(),
                           gb_.data.data(), in_, units_);
  }
  return grad_x;
}

std::vector<ParamRef> DenseLayer::params() {
  return {{"w", &w_, &gw_, true}, {"b", &b_, &gb_, true}};
}

void DenseLayer::init(std::mt19937_64& rng) {
  he_uniform(w_, in_, rng);
  b_.fill(0.0);
}

nlohmann::json DenseLayer::hyper() const {
  return {{"in", in_}, {"units", units_}};
}

// ---------------------------------------------------------------------------
// BatchNormLayer
// ---------------------------------------------------------------------------

BatchNormLayer::BatchNormLayer(std::size_t channels, double momentum, double eps)
    : channels_(channels), gamma_({channels}), beta_({channels}),
      ggamma_({channels}), gbeta_({channels}), state_(channels) {
  gamma_.fill(1.0);
  state_.momentum = momentum;
  state_.eps = eps;
}

Tensor BatchNormLayer::forward(const Tensor& x, Mode mode) {
  return batchnorm_forward(x, gamma_, beta_, state_, mode,
                           mode == Mode::kTrain ? &cache_ : nullptr);
}

Tensor BatchNormLayer::infer(const Tensor& x) const {
  return batchnorm_infer(x, gamma_, beta_, state_);
}

Tensor BatchNormLayer::backward(const Tensor& grad_out) {
  BatchNormGrads g = batchnorm_backward(grad_out, gamma_, cache_);
  for (std::size_t c = 0; c < channels_; ++c) {
    ggamma_.data[c] += g.grad_gamma.data[c];
    gbeta_.data[c] += g.grad_beta.data[c];
  }
  return std::move(g.grad_x);
}

std::vector<ParamRef> BatchNormLayer::params() {
  return {{"gamma", &gamma_, &ggamma_, true},
          {"beta", &beta_, &gbeta_, true},
          {"moving_mean", &state_.moving_mean, nullptr, false},
          {"moving_var", &state_.moving_var, nullptr, false}};
}

nlohmann::json BatchNormLayer::hyper() const {
  return {{"channels", channels_},
          {"momentum", state_.momentum},
          {"eps", state_.eps}};
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

Tensor ReluLayer::forward(const Tensor& x, Mode) {
  cached_x_ = x;
  return relu(x);
}
Tensor ReluLayer::infer(const Tensor& x) const { return relu(x); }
Tensor ReluLayer::backward(const Tensor& grad_out) {
  return relu_backward(grad_out, cached_x_);
}

Tensor SigmoidLayer::forward(const Tensor& x, Mode) {
  cached_y_ = sigmoid(x);
  return cached_y_;
}
Tensor SigmoidLayer::infer(const Tensor& x) const { return sigmoid(x); }
Tensor SigmoidLayer::backward(const Tensor& grad_out) {
  return sigmoid_backward(grad_out, cached_y_);
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

Network& Network::operator=(const Network& other) {
  if (this == &other) return *this;
  auto& src = const_cast<Network&>(other);  // state_to_json is logically const
  nlohmann::json state = src.state_to_json();
  *this = Network::from_manifest(state);
  state_from_json(state);
  return *this;
}

void Network::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& layer : layers_) layer->init(rng);
}

Tensor Network::forward(const Tensor& x, Mode mode) {
  Tensor cur = x;
  for (auto& layer : layers_) {
    cur = layer->forward(cur, mode);
    require_finite(cur, layer->kind());
  }
  return cur;
}

Tensor Network::backward(const Tensor& grad_out) {
  Tensor cur = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    cur = (*it)->backward(cur);
    require_finite(cur, (*it)->kind());
  }
  return cur;
}

Tensor Network::infer(const Tensor& x) const {
  Tensor cur = x;
  for (const auto& layer : layers_) {
    cur = layer->infer(cur);
    require_finite(cur, layer->kind());
  }
  return cur;
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> all;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (ParamRef p : layers_[i]->params()) {
      p.name = "layer" + std::to_string(i) + "." + p.name;
      all.push_back(p);
    }
  }
  return all;
}

void Network::zero_grads() {
  for (auto& p : params()) {
    if (p.grad) p.grad->fill(0.0);
  }
}

ParamCounts Network::param_counts() {
  ParamCounts c;
  for (const auto& p : params()) {
    const std::size_t n = p.value->numel();
    c.total += n;
    (p.trainable ? c.trainable : c.non_trainable) += n;
  }
  return c;
}

nlohmann::json Network::state_to_json() {
  nlohmann::json out = nlohmann::json::array();
  for (auto& layer : layers_) {
    nlohmann::json entry;
    entry["kind"] = layer->kind();
    entry["hyper"] = layer->hyper();
    nlohmann::json params = nlohmann::json::object();
    for (const auto& p : layer->params()) {
      params[p.name] = p.value->data;
    }
    entry["params"] = params;
    out.push_back(entry);
  }
  return out;
}

void Network::state_from_json(const nlohmann::json& j) {
  if (j.size() != layers_.size()) {
    throw CorruptChecksumError("layer manifest does not match network");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& entry = j[i];
    if (entry.at("kind").get<std::string>() != layers_[i]->kind()) {
      throw CorruptChecksumError("layer kind mismatch in checkpoint");
    }
    for (auto& p : layers_[i]->params()) {
      const std::string bare = p.name;
      const auto& values = entry.at("params").at(bare);
      if (values.size() != p.value->numel()) {
        throw CorruptChecksumError("parameter size mismatch for " + bare);
      }
      p.value->data = values.get<std::vector<double>>();
    }
  }
}

Network Network::from_manifest(const nlohmann::json& layers) {
  Network net;
  for (const auto& entry : layers) {
    net.add(make_layer(entry.at("kind").get<std::string>(), entry.at("hyper")));
  }
  return net;
}

std::unique_ptr<Layer> make_layer(const std::string& kind, const nlohmann::json& hyper) {
  if (kind == "conv1d") {
    return std::make_unique<Conv1dLayer>(hyper.at("in_channels").get<std::size_t>(),
                                         hyper.at("filters").get<std::size_t>(),
                                         hyper.at("kernel").get<std::size_t>());
  }
  if (kind == "maxpool1d") {
    return std::make_unique<MaxPool1dLayer>(hyper.at("pool").get<std::size_t>());
  }
  if (kind == "gap1d") return std::make_unique<GlobalAvgPool1dLayer>();
  if (kind == "dense") {
    return std::make_unique<DenseLayer>(hyper.at("in").get<std::size_t>(),
                                        hyper.at("units").get<std::size_t>());
  }
  if (kind == "batchnorm") {
    return std::make_unique<BatchNormLayer>(hyper.at("channels").get<std::size_t>(),
                                            hyper.at("momentum").get<double>(),
                                            hyper.at("eps").get<double>());
  }
  if (kind == "relu") return std::make_unique<ReluLayer>();
  if (kind == "sigmoid") return std::make_unique<SigmoidLayer>();
  throw CorruptChecksumError("unknown layer kind: " + kind);
}

}  // namespace phishlex::nn
