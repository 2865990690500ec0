#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "phishlex/layers.hpp"
#include "test_helpers.hpp"

using namespace phishlex;
using nn::Tensor;
using testutil::max_grad_rel_err;
using testutil::random_tensor;

namespace {

// Scalar objective used by the gradient checks: sum(output .* projection).
double projected(const Tensor& out, const Tensor& proj) {
  double total = 0.0;
  for (std::size_t i = 0; i < out.numel(); ++i) total += out.data[i] * proj.data[i];
  return total;
}

}  // namespace

TEST_CASE("conv1d forward matches hand-computed examples") {
  // Identity-tap kernel [0,1,0] picks the middle of each window.
  Tensor x({4, 1}, {5, 6, 7, 8});
  Tensor w({3, 1, 1}, {0, 1, 0});
  Tensor b({1}, {0});
  Tensor y = nn::conv1d_forward(x, w, b);
  CHECK(y.shape == std::vector<std::size_t>{2, 1});
  CHECK(y.data[0] == doctest::Approx(6.0));
  CHECK(y.data[1] == doctest::Approx(7.0));

  // [1,0,-1] difference kernel.
  Tensor x2({4, 1}, {1, 2, 3, 4});
  Tensor w2({3, 1, 1}, {1, 0, -1});
  Tensor y2 = nn::conv1d_forward(x2, w2, b);
  CHECK(y2.data[0] == doctest::Approx(-2.0));
  CHECK(y2.data[1] == doctest::Approx(-2.0));
}

TEST_CASE("conv1d output shape and parameter count match the 21->19 layer") {
  std::mt19937_64 rng(1);
  Tensor x = random_tensor({21, 1}, rng);
  Tensor w = random_tensor({3, 1, 32}, rng);
  Tensor b = random_tensor({32}, rng);
  Tensor y = nn::conv1d_forward(x, w, b);
  CHECK(y.shape == std::vector<std::size_t>{19, 32});
  CHECK(w.numel() + b.numel() == 128);

  CHECK_THROWS_AS(nn::conv1d_forward(random_tensor({2, 1}, rng), w, b),
                  ShapeMismatchError);
}

TEST_CASE("conv1d backward matches central finite differences") {
  std::mt19937_64 rng(7);
  Tensor x = random_tensor({8, 2}, rng);
  Tensor w = random_tensor({3, 2, 4}, rng);
  Tensor b = random_tensor({4}, rng);
  Tensor proj = random_tensor({6, 4}, rng);

  nn::Conv1dGrads grads = nn::conv1d_backward(proj, x, w);
  auto objective = [&]() { return projected(nn::conv1d_forward(x, w, b), proj); };

  CHECK(max_grad_rel_err(x, grads.grad_x, objective) < 1e-6);
  CHECK(max_grad_rel_err(w, grads.grad_w, objective) < 1e-6);
  CHECK(max_grad_rel_err(b, grads.grad_b, objective) < 1e-6);
}

TEST_CASE("conv1d backward is linear and zero on zero upstream gradient") {
  std::mt19937_64 rng(9);
  Tensor x = random_tensor({8, 2}, rng);
  Tensor w = random_tensor({3, 2, 4}, rng);
  Tensor zero({6, 4});
  nn::Conv1dGrads g0 = nn::conv1d_backward(zero, x, w);
  CHECK(std::all_of(g0.grad_x.data.begin(), g0.grad_x.data.end(),
                    [](double v) { return v == 0.0; }));
  CHECK(std::all_of(g0.grad_w.data.begin(), g0.grad_w.data.end(),
                    [](double v) { return v == 0.0; }));

  Tensor g = random_tensor({6, 4}, rng);
  Tensor g2 = g;
  for (double& v : g2.data) v *= 2.0;
  nn::Conv1dGrads a = nn::conv1d_backward(g, x, w);
  nn::Conv1dGrads b2 = nn::conv1d_backward(g2, x, w);
  for (std::size_t i = 0; i < a.grad_w.numel(); ++i) {
    CHECK(b2.grad_w.data[i] == doctest::Approx(2.0 * a.grad_w.data[i]));
  }
}

TEST_CASE("maxpool1d halves length, drops the odd tail, and routes gradients") {
  Tensor x({4, 1}, {1, 3, 2, 5});
  auto r = nn::maxpool1d_forward(x);
  CHECK(r.out.data == std::vector<double>{3, 5});
  CHECK(r.argmax == std::vector<std::uint32_t>{1, 3});

  std::mt19937_64 rng(11);
  Tensor x19 = random_tensor({19, 32}, rng);
  auto r19 = nn::maxpool1d_forward(x19);
  CHECK(r19.out.shape == std::vector<std::size_t>{9, 32});

  // Gradient check on a small input.
  Tensor xs = random_tensor({6, 3}, rng);
  Tensor proj = random_tensor({3, 3}, rng);
  auto fwd = nn::maxpool1d_forward(xs);
  Tensor grad_x = nn::maxpool1d_backward(proj, fwd.argmax, 6);
  auto objective = [&]() {
    return projected(nn::maxpool1d_forward(xs).out, proj);
  };
  CHECK(max_grad_rel_err(xs, grad_x, objective) < 1e-6);
}

TEST_CASE("gap1d averages channels and spreads gradient uniformly") {
  Tensor x({3, 1}, {2, 4, 6});
  CHECK(nn::gap1d_forward(x).data[0] == doctest::Approx(4.0));

  std::mt19937_64 rng(13);
  Tensor x7 = random_tensor({7, 64}, rng);
  CHECK(nn::gap1d_forward(x7).shape == std::vector<std::size_t>{64});

  Tensor xs = random_tensor({5, 3}, rng);
  Tensor proj = random_tensor({3}, rng);
  Tensor grad_x = nn::gap1d_backward(proj, 5);
  auto objective = [&]() { return projected(nn::gap1d_forward(xs), proj); };
  CHECK(max_grad_rel_err(xs, grad_x, objective) < 1e-6);
}

TEST_CASE("dense layer: parameter counts, identity map, gradients") {
  CHECK(64 * 64 + 64 == 4160);
  CHECK(64 * 1 + 1 == 65);

  Tensor x({3}, {1.5, -2.0, 0.25});
  Tensor w({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Tensor b({3});
  Tensor y = nn::dense_forward(x, w, b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));

  std::mt19937_64 rng(17);
  Tensor xr = random_tensor({6}, rng);
  Tensor wr = random_tensor({6, 4}, rng);
  Tensor br = random_tensor({4}, rng);
  Tensor proj = random_tensor({4}, rng);
  nn::DenseGrads grads = nn::dense_backward(proj, xr, wr);
  auto objective = [&]() { return projected(nn::dense_forward(xr, wr, br), proj); };
  CHECK(max_grad_rel_err(xr, grads.grad_x, objective) < 1e-6);
  CHECK(max_grad_rel_err(wr, grads.grad_w, objective) < 1e-6);
  CHECK(max_grad_rel_err(br, grads.grad_b, objective) < 1e-6);
}

TEST_CASE("batchnorm normalizes batches and tracks moving statistics") {
  std::mt19937_64 rng(19);
  const std::size_t n = 16, c = 5;
  Tensor x = random_tensor({n, c}, rng, -3.0, 3.0);
  Tensor gamma({c});
  gamma.fill(1.0);
  Tensor beta({c});
  nn::BatchNormState state(c);

  Tensor y = nn::batchnorm_forward(x, gamma, beta, state, nn::Mode::kTrain);
  for (std::size_t j = 0; j < c; ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += y.at2(i, j);
    mean /= n;
    for (std::size_t i = 0; i < n; ++i) {
      var += (y.at2(i, j) - mean) * (y.at2(i, j) - mean);
    }
    var /= n;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-4);  // eps shifts variance slightly below 1
  }

  // Infer mode with unit moving stats is (nearly) the identity.
  nn::BatchNormState fresh(c);
  Tensor yi = nn::batchnorm_infer(x, gamma, beta, fresh);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    CHECK(yi.data[i] == doctest::Approx(x.data[i]).epsilon(1e-4));
  }

  CHECK_THROWS_AS(
      nn::batchnorm_forward(random_tensor({1, c}, rng), gamma, beta, state,
                            nn::Mode::kTrain),
      BatchTooSmallError);
}

TEST_CASE("batchnorm backward matches central finite differences") {
  std::mt19937_64 rng(23);
  const std::size_t n = 6, c = 4;
  Tensor x = random_tensor({n, c}, rng);
  Tensor gamma = random_tensor({c}, rng, 0.5, 1.5);
  Tensor beta = random_tensor({c}, rng);
  Tensor proj = random_tensor({n, c}, rng);

  nn::BatchNormCache cache;
  nn::BatchNormState state(c);
  nn::batchnorm_forward(x, gamma, beta, state, nn::Mode::kTrain, &cache);
  nn::BatchNormGrads grads = nn::batchnorm_backward(proj, gamma, cache);

  auto objective = [&]() {
    nn::BatchNormState s(c);
    return projected(nn::batchnorm_forward(x, gamma, beta, s, nn::Mode::kTrain),
                     proj);
  };
  CHECK(max_grad_rel_err(x, grads.grad_x, objective) < 1e-4);
  CHECK(max_grad_rel_err(gamma, grads.grad_gamma, objective) < 1e-4);
  CHECK(max_grad_rel_err(beta, grads.grad_beta, objective) < 1e-4);
}

TEST_CASE("activations: values, stability, gradients") {
  Tensor x({2}, {-3.0, 3.0});
  Tensor y = nn::relu(x);
  CHECK(y.data[0] == 0.0);
  CHECK(y.data[1] == 3.0);

  Tensor zero({1}, {0.0});
  CHECK(nn::sigmoid(zero).data[0] == doctest::Approx(0.5));

  Tensor extreme({2}, {-500.0, 500.0});
  Tensor s = nn::sigmoid(extreme);
  CHECK(s.data[0] > 0.0);
  CHECK(std::isfinite(s.data[0]));
  CHECK(s.data[1] <= 1.0);  // rounds to exactly 1.0 in f64
  CHECK(std::isfinite(s.data[1]));

  std::mt19937_64 rng(29);
  Tensor xr = random_tensor({12}, rng, -2.0, 2.0);
  Tensor proj = random_tensor({12}, rng);
  Tensor sig = nn::sigmoid(xr);
  Tensor g = nn::sigmoid_backward(proj, sig);
  auto objective = [&]() { return projected(nn::sigmoid(xr), proj); };
  CHECK(max_grad_rel_err(xr, g, objective) < 1e-4);
}

TEST_CASE("bce loss values and logit gradient") {
  std::vector<double> one{1.0}, y1{1.0};
  CHECK(nn::bce_loss(one, y1) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(nn::bce_loss(one, y1) > 0.0);  // clamped away from exact zero

  std::vector<double> half{0.5};
  std::vector<double> y0{0.0};
  CHECK(nn::bce_loss(half, y1) == doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_loss(half, y0) == doctest::Approx(std::log(2.0)));

  // d(bce(sigmoid(z)))/dz == p - y, checked against finite differences.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    double z = dist(rng);
    const double label = trial % 2 ? 1.0 : 0.0;
    auto loss_of_z = [&]() {
      Tensor zt({1}, {z});
      Tensor p = nn::sigmoid(zt);
      std::vector<double> y{label};
      return nn::bce_loss(p.data, y);
    };
    const double p = nn::kernel::sigmoid(z);
    const double analytic = p - label;
    const double fd = testutil::central_diff(z, loss_of_z);
    CHECK(testutil::rel_err(analytic, fd) < 1e-6);
  }
}

TEST_CASE("adam: zero gradients are a fixed point; step size approaches lr") {
  nn::AdamConfig cfg;
  Tensor params({3}, {1.0, -2.0, 0.5});
  Tensor before = params;
  nn::AdamMoments moments(params.shape);
  Tensor zero({3});
  nn::adam_step(params, zero, moments, 1, cfg);
  CHECK(params.data == before.data);

  // Constant gradient: |delta| per step converges to lr.
  Tensor p({1}, {0.0});
  nn::AdamMoments m(p.shape);
  Tensor g({1}, {0.37});
  double last = p.data[0];
  double delta = 0.0;
  for (long t = 1; t <= 1000; ++t) {
    nn::adam_step(p, g, m, t, cfg);
    delta = std::abs(p.data[0] - last);
    last = p.data[0];
  }
  CHECK(delta == doctest::Approx(cfg.lr).epsilon(0.05));

  // Determinism: same inputs, same trajectory.
  Tensor pa({2}, {0.1, 0.2}), pb({2}, {0.1, 0.2});
  nn::AdamMoments ma(pa.shape), mb(pb.shape);
  std::mt19937_64 rng(37);
  for (long t = 1; t <= 50; ++t) {
    Tensor grad = random_tensor({2}, rng);
    nn::adam_step(pa, grad, ma, t, cfg);
    nn::adam_step(pb, grad, mb, t, cfg);
  }
  CHECK(pa.data == pb.data);
}

TEST_CASE("tensor finiteness guard") {
  Tensor t({2}, {1.0, 2.0});
  CHECK(t.all_finite());
  t.data[1] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(t.all_finite());
  CHECK_THROWS_AS(nn::require_finite(t, "test"), NonFiniteError);
}
