#include "phishlex/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace phishlex::nn {

namespace kernel {

void conv1d_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t len, std::size_t in_ch, std::size_t kernel,
                    std::size_t filters) {
  const std::size_t out_len = len - kernel + 1;
  for (std::size_t t = 0; t < out_len; ++t) {
    double* yt = y + t * filters;
    for (std::size_t f = 0; f < filters; ++f) yt[f] = b[f];
    for (std::size_t k = 0; k < kernel; ++k) {
      const double* xt = x + (t + k) * in_ch;
      const double* wk = w + k * in_ch * filters;
      for (std::size_t c = 0; c < in_ch; ++c) {
        const double xv = xt[c];
        const double* wc = wk + c * filters;
        for (std::size_t f = 0; f < filters; ++f) yt[f] += xv * wc[f];
      }
    }
  }
}

void conv1d_backward(const double* grad_out, const double* x, const double* w,
                     double* grad_x, double* grad_w, double* grad_b,
                     std::size_t len, std::size_t in_ch, std::size_t kernel,
                     std::size_t filters) {
  const std::size_t out_len = len - kernel + 1;
  for (std::size_t t = 0; t < out_len; ++t) {
    const double* gt = grad_out + t * filters;
    for (std::size_t f = 0; f < filters; ++f) grad_b[f] += gt[f];
    for (std::size_t k = 0; k < kernel; ++k) {
      const double* xt = x + (t + k) * in_ch;
      double* gxt = grad_x + (t + k) * in_ch;
      const double* wk = w + k * in_ch * filters;
      double* gwk = grad_w + k * in_ch * filters;
      for (std::size_t c = 0; c < in_ch; ++c) {
        const double xv = xt[c];
        const double* wc = wk + c * filters;
        double* gwc = gwk + c * filters;
        double acc = 0.0;
        for (std::size_t f = 0; f < filters; ++f) {
          const double g = gt[f];
          gwc[f] += xv * g;
          acc += wc[f] * g;
        }
        gxt[c] += acc;
      }
    }
  }
}

void maxpool1d_forward(const double* x, double* y, std::uint32_t* argmax,
                       std::size_t len, std::size_t channels, std::size_t pool) {
  const std::size_t out_len = len / pool;
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::size_t best = t * pool;
      double best_v = x[best * channels + c];
      for (std::size_t k = 1; k < pool; ++k) {
        const std::size_t l = t * pool + k;
        const double v = x[l * channels + c];
        if (v > best_v) {  // ties keep the earliest position
          best_v = v;
          best = l;
        }
      }
      y[t * channels + c] = best_v;
      argmax[t * channels + c] = static_cast<std::uint32_t>(best);
    }
  }
}

void maxpool1d_backward(const double* grad_out, const std::uint32_t* argmax,
                        double* grad_x, std::size_t len, std::size_t channels,
                        std::size_t pool) {
  const std::size_t out_len = len / pool;
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      grad_x[argmax[t * channels + c] * channels + c] += grad_out[t * channels + c];
    }
  }
}

void gap1d_forward(const double* x, double* y, std::size_t len, std::size_t channels) {
  for (std::size_t c = 0; c < channels; ++c) y[c] = 0.0;
  for (std::size_t l = 0; l < len; ++l) {
    const double* xl = x + l * channels;
    for (std::size_t c = 0; c < channels; ++c) y[c] += xl[c];
  }
  const double inv = 1.0 / static_cast<double>(len);
  for (std::size_t c = 0; c < channels; ++c) y[c] *= inv;
}

void gap1d_backward(const double* grad_out, double* grad_x, std::size_t len,
                    std::size_t channels) {
  const double inv = 1.0 / static_cast<double>(len);
  for (std::size_t l = 0; l < len; ++l) {
    double* gl = grad_x + l * channels;
    for (std::size_t c = 0; c < channels; ++c) gl[c] += grad_out[c] * inv;
  }
}

void dense_forward(const double* x, const double* w, const double* b, double* y,
                   std::size_t in, std::size_t units) {
  for (std::size_t u = 0; u < units; ++u) y[u] = b[u];
  for (std::size_t i = 0; i < in; ++i) {
    const double xv = x[i];
    const double* wi = w + i * units;
    for (std::size_t u = 0; u < units; ++u) y[u] += xv * wi[u];
  }
}

void dense_backward(const double* grad_out, const double* x, const double* w,
                    double* grad_x, double* grad_w, double* grad_b, std::size_t in,
                    std::size_t units) {
  for (std::size_t u = 0; u < units; ++u) grad_b[u] += grad_out[u];
  for (std::size_t i = 0; i < in; ++i) {
    const double xv = x[i];
    const double* wi = w + i * units;
    double* gwi = grad_w + i * units;
    double acc = 0.0;
    for (std::size_t u = 0; u < units; ++u) {
      const double g = grad_out[u];
      gwi[u] += xv * g;
      acc += wi[u] * g;
    }
    grad_x[i] += acc;
  }
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

double sigmoid(double v) {
  if (v >= 0.0) {
    return 1.0 / (1.0 + std::exp(-v));
  }
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace kernel

// ---------------------------------------------------------------------------
// Single-sample wrappers.
// ---------------------------------------------------------------------------

Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank(x, 2, "conv1d input");
  require_rank(w, 3, "conv1d weights");
  require_rank(b, 1, "conv1d bias");
  const std::size_t len = x.dim(0), in_ch = x.dim(1);
  const std::size_t kernel = w.dim(0), filters = w.dim(2);
  if (w.dim(1) != in_ch || b.dim(0) != filters || len < kernel) {
    throw ShapeMismatchError("conv1d: incompatible input/weight/bias shapes");
  }
  Tensor y({len - kernel + 1, filters});
  kernel::conv1d_forward(x.data.data(), w.data.data(), b.data.data(), y.data.data(),
                         len, in_ch, kernel, filters);
  return y;
}

Conv1dGrads conv1d_backward(const Tensor& grad_out, const Tensor& x, const Tensor& w) {
  const std::size_t len = x.dim(0), in_ch = x.dim(1);
  const std::size_t kernel = w.dim(0), filters = w.dim(2);
  require_shape(grad_out, {len - kernel + 1, filters}, "conv1d grad_out");
  Conv1dGrads g{Tensor(x.shape), Tensor(w.shape), Tensor({filters})};
  kernel::conv1d_backward(grad_out.data.data(), x.data.data(), w.data.data(),
                          g.grad_x.data.data(), g.grad_w.data.data(),
                          g.grad_b.data.data(), len, in_ch, kernel, filters);
  return g;
}

MaxPool1dResult maxpool1d_forward(const Tensor& x, std::size_t pool) {
  require_rank(x, 2, "maxpool1d input");
  const std::size_t len = x.dim(0), channels = x.dim(1);
  if (len < pool) throw ShapeMismatchError("maxpool1d: input shorter than pool window");
  MaxPool1dResult r{Tensor({len / pool, channels}),
                    std::vector<std::uint32_t>((len / pool) * channels)};
  kernel::maxpool1d_forward(x.data.data(), r.out.data.data(), r.argmax.data(), len,
                            channels, pool);
  return r;
}

Tensor maxpool1d_backward(const Tensor& grad_out,
                          const std::vector<std::uint32_t>& argmax,
                          std::size_t input_len, std::size_t pool) {
  require_rank(grad_out, 2, "maxpool1d grad_out");
  const std::size_t channels = grad_out.dim(1);
  if (grad_out.numel() != argmax.size()) {
    throw ShapeMismatchError("maxpool1d: argmax cache does not match grad_out");
  }
  Tensor grad_x({input_len, channels});
  kernel::maxpool1d_backward(grad_out.data.data(), argmax.data(), grad_x.data.data(),
                             input_len, channels, pool);
  return grad_x;
}

Tensor gap1d_forward(const Tensor& x) {
  require_rank(x, 2, "gap1d input");
  Tensor y({x.dim(1)});
  kernel::gap1d_forward(x.data.data(), y.data.data(), x.dim(0), x.dim(1));
  return y;
}

Tensor gap1d_backward(const Tensor& grad_out, std::size_t input_len) {
  require_rank(grad_out, 1, "gap1d grad_out");
  Tensor grad_x({input_len, grad_out.dim(0)});
  kernel::gap1d_backward(grad_out.data.data(), grad_x.data.data(), input_len,
                         grad_out.dim(0));
  return grad_x;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank(x, 1, "dense input");
  require_rank(w, 2, "dense weights");
  if (w.dim(0) != x.dim(0) || b.dim(0) != w.dim(1)) {
    throw ShapeMismatchError("dense: incompatible input/weight/bias shapes");
  }
  Tensor y({w.dim(1)});
  kernel::dense_forward(x.data.data(), w.data.data(), b.data.data(), y.data.data(),
                        x.dim(0), w.dim(1));
  return y;
}

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& x, const Tensor& w) {
  require_shape(grad_out, {w.dim(1)}, "dense grad_out");
  DenseGrads g{Tensor(x.shape), Tensor(w.shape), Tensor({w.dim(1)})};
  kernel::dense_backward(grad_out.data.data(), x.data.data(), w.data.data(),
                         g.grad_x.data.data(), g.grad_w.data.data(),
                         g.grad_b.data.data(), x.dim(0), w.dim(1));
  return g;
}

// ---------------------------------------------------------------------------
// Batch normalization.
// ---------------------------------------------------------------------------

Tensor batchnorm_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                         BatchNormState& state, Mode mode, BatchNormCache* cache) {
  require_rank(x, 2, "batchnorm input");
  const std::size_t n = x.dim(0), channels = x.dim(1);
  if (gamma.dim(0) != channels || beta.dim(0) != channels ||
      state.moving_mean.dim(0) != channels) {
    throw ShapeMismatchError("batchnorm: parameter shapes do not match input");
  }
  if (mode == Mode::kInfer) {
    return batchnorm_infer(x, gamma, beta, state);
  }

  Tensor y(x.shape);
  if (n < 2) {
    throw BatchTooSmallError("batchnorm train mode requires batch size >= 2");
  }

  std::vector<double> mean(channels, 0.0), var(channels, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) mean[c] += x.at2(i, c);
  }
  for (std::size_t c = 0; c < channels; ++c) mean[c] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double d = x.at2(i, c) - mean[c];
      var[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < channels; ++c) var[c] /= static_cast<double>(n);

  BatchNormCache local;
  BatchNormCache& cc = cache ? *cache : local;
  cc.x_hat = Tensor(x.shape);
  cc.centered = Tensor(x.shape);
  cc.inv_std = Tensor({channels});

  for (std::size_t c = 0; c < channels; ++c) {
    const double inv = 1.0 / std::sqrt(var[c] + state.eps);
    cc.inv_std.data[c] = inv;
    const double g = gamma.data[c], b = beta.data[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double centered = x.at2(i, c) - mean[c];
      const double x_hat = centered * inv;
      cc.centered.at2(i, c) = centered;
      cc.x_hat.at2(i, c) = x_hat;
      y.at2(i, c) = g * x_hat + b;
    }
    state.moving_mean.data[c] =
        state.momentum * state.moving_mean.data[c] + (1.0 - state.momentum) * mean[c];
    state.moving_var.data[c] =
        state.momentum * state.moving_var.data[c] + (1.0 - state.momentum) * var[c];
  }
  return y;
}

Tensor batchnorm_infer(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       const BatchNormState& state) {
  require_rank(x, 2, "batchnorm input");
  const std::size_t n = x.dim(0), channels = x.dim(1);
  if (gamma.dim(0) != channels || state.moving_mean.dim(0) != channels) {
    throw ShapeMismatchError("batchnorm: parameter shapes do not match input");
  }
  Tensor y(x.shape);
  for (std::size_t c = 0; c < channels; ++c) {
    const double inv = 1.0 / std::sqrt(state.moving_var.data[c] + state.eps);
    const double mu = state.moving_mean.data[c];
    const double g = gamma.data[c], b = beta.data[c];
    for (std::size_t i = 0; i < n; ++i) {
      y.at2(i, c) = g * (x.at2(i, c) - mu) * inv + b;
    }
  }
  return y;
}

BatchNormGrads batchnorm_backward(const Tensor& grad_out, const Tensor& gamma,
                                  const BatchNormCache& cache) {
  const std::size_t n = grad_out.dim(0), channels = grad_out.dim(1);
  if (!grad_out.same_shape(cache.x_hat)) {
    throw ShapeMismatchError("batchnorm backward: grad_out does not match cache");
  }
  BatchNormGrads g{Tensor(grad_out.shape), Tensor({channels}), Tensor({channels})};
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t c = 0; c < channels; ++c) {
    double sum_g = 0.0, sum_g_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double go = grad_out.at2(i, c);
      sum_g += go;
      sum_g_xhat += go * cache.x_hat.at2(i, c);
    }
    g.grad_beta.data[c] = sum_g;
    g.grad_gamma.data[c] = sum_g_xhat;

    const double gm = gamma.data[c];
    const double inv = cache.inv_std.data[c];
    // dx = gamma * inv_std * (g - mean(g) - x_hat * mean(g * x_hat))
    for (std::size_t i = 0; i < n; ++i) {
      const double go = grad_out.at2(i, c);
      g.grad_x.at2(i, c) =
          gm * inv *
          (go - sum_g * inv_n - cache.x_hat.at2(i, c) * sum_g_xhat * inv_n);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Activations.
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& x) {
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) y.data[i] = kernel::relu(x.data[i]);
  return y;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& x) {
  if (!grad_out.same_shape(x)) {
    throw ShapeMismatchError("relu backward: shape mismatch");
  }
  Tensor g(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    g.data[i] = x.data[i] > 0.0 ? grad_out.data[i] : 0.0;
  }
  return g;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) y.data[i] = kernel::sigmoid(x.data[i]);
  return y;
}

Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y) {
  if (!grad_out.same_shape(y)) {
    throw ShapeMismatchError("sigmoid backward: shape mismatch");
  }
  Tensor g(y.shape);
  for (std::size_t i = 0; i < y.numel(); ++i) {
    g.data[i] = grad_out.data[i] * y.data[i] * (1.0 - y.data[i]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Loss and optimizer.
// ---------------------------------------------------------------------------

double bce_loss(std::span<const double> p, std::span<const double> y) {
  if (p.size() != y.size() || p.empty()) {
    throw ShapeMismatchError("bce_loss: probability/label size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
    total += -(y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc));
  }
  return total / static_cast<double>(p.size());
}

std::vector<double> bce_grad(std::span<const double> p, std::span<const double> y) {
  if (p.size() != y.size() || p.empty()) {
    throw ShapeMismatchError("bce_grad: probability/label size mismatch");
  }
  std::vector<double> g(p.size());
  const double inv_n = 1.0 / static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
    g[i] = (-y[i] / pc + (1.0 - y[i]) / (1.0 - pc)) * inv_n;
  }
  return g;
}

void adam_step(Tensor& params, const Tensor& grads, AdamMoments& moments, long t,
               const AdamConfig& cfg) {
  if (!params.same_shape(grads) || !params.same_shape(moments.m)) {
    throw ShapeMismatchError("adam_step: shape mismatch");
  }
  if (t < 1) throw InvalidArgumentError("adam_step: t must be >= 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.numel(); ++i) {
    const double g = grads.data[i];
    moments.m.data[i] = cfg.beta1 * moments.m.data[i] + (1.0 - cfg.beta1) * g;
    moments.v.data[i] = cfg.beta2 * moments.v.data[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = moments.m.data[i] / bc1;
    const double v_hat = moments.v.data[i] / bc2;
    params.data[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace phishlex::nn
