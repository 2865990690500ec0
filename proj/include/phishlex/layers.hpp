#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phishlex/tensor.hpp"

namespace phishlex::nn {

enum class Mode { kTrain, kInfer };

// ---------------------------------------------------------------------------
// Raw kernels. No allocation, no shape checks; callers slice batches onto
// these. Layouts: x[L][Cin], w[K][Cin][F], y[T][F] with T = L-K+1.
// ---------------------------------------------------------------------------
namespace kernel {

void conv1d_forward(const double* x, const double* w, const double* b, double* y,
                    std::size_t len, std::size_t in_ch, std::size_t kernel,
                    std::size_t filters);
void conv1d_backward(const double* grad_out, const double* x, const double* w,
                     double* grad_x, double* grad_w, double* grad_b,
                     std::size_t len, std::size_t in_ch, std::size_t kernel,
                     std::size_t filters);

void maxpool1d_forward(const double* x, double* y, std::uint32_t* argmax,
                       std::size_t len, std::size_t channels, std::size_t pool);
void maxpool1d_backward(const double* grad_out, const std::uint32_t* argmax,
                        double* grad_x, std::size_t len, std::size_t channels,
                        std::size_t pool);

void gap1d_forward(const double* x, double* y, std::size_t len, std::size_t channels);
void gap1d_backward(const double* grad_out, double* grad_x, std::size_t len,
                    std::size_t channels);

void dense_forward(const double* x, const double* w, const double* b, double* y,
                   std::size_t in, std::size_t units);
void dense_backward(const double* grad_out, const double* x, const double* w,
                    double* grad_x, double* grad_w, double* grad_b, std::size_t in,
                    std::size_t units);

double relu(double v);
double sigmoid(double v);

}  // namespace kernel

// ---------------------------------------------------------------------------
// Single-sample operations.
// ---------------------------------------------------------------------------

// x: [L, Cin], w: [K, Cin, F], b: [F] -> [L-K+1, F]. Valid convolution,
// stride 1.
Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& b);

struct Conv1dGrads {
  Tensor grad_x, grad_w, grad_b;
};
Conv1dGrads conv1d_backward(const Tensor& grad_out, const Tensor& x, const Tensor& w);

// Non-overlapping windows of `pool`, trailing remainder dropped. `argmax`
// holds the source row index for each output element.
struct MaxPool1dResult {
  Tensor out;
  std::vector<std::uint32_t> argmax;
};
MaxPool1dResult maxpool1d_forward(const Tensor& x, std::size_t pool = 2);
Tensor maxpool1d_backward(const Tensor& grad_out,
                          const std::vector<std::uint32_t>& argmax,
                          std::size_t input_len, std::size_t pool = 2);

// [L, C] -> [C], per-channel mean over L.
Tensor gap1d_forward(const Tensor& x);
Tensor gap1d_backward(const Tensor& grad_out, std::size_t input_len);

// x: [I], w: [I, U], b: [U] -> [U].
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b);
struct DenseGrads {
  Tensor grad_x, grad_w, grad_b;
};
DenseGrads dense_backward(const Tensor& grad_out, const Tensor& x, const Tensor& w);

// ---------------------------------------------------------------------------
// Batch normalization over a batch [N, C].
// ---------------------------------------------------------------------------

struct BatchNormState {
  Tensor moving_mean;  // [C]
  Tensor moving_var;   // [C], entries > 0
  double momentum = 0.9;
  double eps = 1e-5;

  explicit BatchNormState(std::size_t channels = 0)
      : moving_mean({channels}), moving_var({channels}) {
    moving_var.fill(1.0);
  }
};

struct BatchNormCache {
  Tensor x_hat;     // [N, C]
  Tensor centered;  // [N, C]
  Tensor inv_std;   // [C]
};

// Train mode: normalize by batch statistics (population variance), update
// moving stats; requires N >= 2. Infer mode: normalize by moving stats.
Tensor batchnorm_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                         BatchNormState& state, Mode mode,
                         BatchNormCache* cache = nullptr);

// Inference-mode normalization against frozen moving statistics.
Tensor batchnorm_infer(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       const BatchNormState& state);

struct BatchNormGrads {
  Tensor grad_x, grad_gamma, grad_beta;
};
BatchNormGrads batchnorm_backward(const Tensor& grad_out, const Tensor& gamma,
                                  const BatchNormCache& cache);

// ---------------------------------------------------------------------------
// Activations (elementwise, any shape).
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& grad_out, const Tensor& x);

Tensor sigmoid(const Tensor& x);
// `y` is the sigmoid output from the forward pass.
Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y);

// ---------------------------------------------------------------------------
// Binary cross-entropy. Probabilities clamped to [1e-7, 1 - 1e-7]; batch
// losses averaged.
// ---------------------------------------------------------------------------

inline constexpr double kBceClamp = 1e-7;

double bce_loss(std::span<const double> p, std::span<const double> y);
// d(mean loss)/dp for each element.
std::vector<double> bce_grad(std::span<const double> p, std::span<const double> y);

// ---------------------------------------------------------------------------
// Adam with bias correction.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  Tensor m, v;
  explicit AdamMoments(const std::vector<std::size_t>& shape = {0})
      : m(shape), v(shape) {}
};

// t is the 1-based step count.
void adam_step(Tensor& params, const Tensor& grads, AdamMoments& moments,
               long t, const AdamConfig& cfg);

}  // namespace phishlex::nn
