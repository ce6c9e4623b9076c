#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "core/common.hpp"
#include "core/nn/conv.hpp"
#include "core/nn/layers.hpp"
#include "core/nn/loss.hpp"
#include "core/nn/module.hpp"
#include "core/rng.hpp"

using namespace mribench;
using namespace mribench::nn;

namespace {

void fill_random(Tensor& t, Rng& rng, double scale = 1.0) {
  for (auto& v : t.data) v = static_cast<float>(rng.normal() * scale);
}

// Scalar objective used for finite-difference checks: weighted sum of the
// module output, with fixed weights so the gradient is nontrivial.
double objective(const Tensor& out) {
  double acc = 0.0;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    acc += out.data[i] * std::sin(0.37 * static_cast<double>(i + 1));
  }
  return acc;
}

Tensor objective_grad(const Tensor& out) {
  Tensor g(out.shape);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    g.data[i] = static_cast<float>(std::sin(0.37 * static_cast<double>(i + 1)));
  }
  return g;
}

// Central finite differences on every element of `target`, compared against
// the analytic gradient with a norm-relative criterion.
void check_gradient(Module& m, Tensor& input, Tensor* target_values,
                    const Tensor& analytic, bool train_mode = true,
                    double h = 1e-2, double tol = 2e-2) {
  Tensor& target = target_values ? *target_values : input;
  REQUIRE(analytic.data.size() == target.data.size());

  double num_sq = 0.0, diff_sq = 0.0;
  for (std::size_t i = 0; i < target.data.size(); ++i) {
    float saved = target.data[i];
    target.data[i] = saved + static_cast<float>(h);
    double up = objective(m.forward(input, train_mode));
    target.data[i] = saved - static_cast<float>(h);
    double down = objective(m.forward(input, train_mode));
    target.data[i] = saved;
    double fd = (up - down) / (2.0 * h);
    double diff = fd - analytic.data[i];
    num_sq += fd * fd;
    diff_sq += diff * diff;
  }
  double rel = std::sqrt(diff_sq) / (std::sqrt(num_sq) + 1e-12);
  CHECK(rel < tol);
}

}  // namespace

TEST_CASE("conv2d forward matches direct convolution on a known case") {
  // 1x1 input channel, 3x3 kernel, identity-ish check by hand.
  Conv2d conv("c", 1, 1, 3, 1, 1);
  for (auto& v : conv.weight().value.data) v = 0.0f;
  conv.weight().value.data[4] = 1.0f;  // center tap => identity

  Tensor x({1, 1, 4, 4});
  Rng rng(1);
  fill_random(x, rng);
  auto y = conv.forward(x, false);
  REQUIRE(y.shape == x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(x.data[i]));
}

TEST_CASE("conv2d stride and padding geometry") {
  Conv2d conv("c", 3, 8, 3, 2, 1);
  Tensor x({2, 3, 11, 11});
  Rng rng(2);
  fill_random(x, rng);
  auto y = conv.forward(x, false);
  CHECK(y.shape == std::vector<int>{2, 8, 6, 6});
}

TEST_CASE("conv2d gradients match finite differences") {
  Rng rng(3);

  SUBCASE("3x3 conv, stride 2, padding 1") {
    Conv2d conv("c", 2, 3, 3, 2, 1, 1, true);
    fill_random(conv.weight().value, rng, 0.5);
    fill_random(conv.bias().value, rng, 0.1);
    Tensor x({2, 2, 7, 7});
    fill_random(x, rng);

    auto out = conv.forward(x, true);
    auto gin = conv.backward(objective_grad(out));

    check_gradient(conv, x, nullptr, gin);
    conv.weight().zero_grad();
    conv.forward(x, true);
    conv.backward(objective_grad(out));
    check_gradient(conv, x, &conv.weight().value, conv.weight().grad);
  }

  SUBCASE("pointwise 1x1 conv") {
    Conv2d conv("c", 4, 6, 1, 1, 0);
    fill_random(conv.weight().value, rng, 0.5);
    Tensor x({3, 4, 5, 5});
    fill_random(x, rng);
    auto out = conv.forward(x, true);
    auto gin = conv.backward(objective_grad(out));
    check_gradient(conv, x, nullptr, gin);
  }

  SUBCASE("depthwise 3x3 conv") {
    Conv2d conv("c", 5, 5, 3, 1, 1, 5);
    fill_random(conv.weight().value, rng, 0.5);
    Tensor x({2, 5, 6, 6});
    fill_random(x, rng);
    auto out = conv.forward(x, true);
    auto gin = conv.backward(objective_grad(out));
    check_gradient(conv, x, nullptr, gin);

    conv.weight().zero_grad();
    conv.forward(x, true);
    conv.backward(objective_grad(out));
    check_gradient(conv, x, &conv.weight().value, conv.weight().grad);
  }

  SUBCASE("depthwise stride 2") {
    Conv2d conv("c", 3, 3, 3, 2, 1, 3);
    fill_random(conv.weight().value, rng, 0.5);
    Tensor x({1, 3, 9, 9});
    fill_random(x, rng);
    auto out = conv.forward(x, true);
    auto gin = conv.backward(objective_grad(out));
    check_gradient(conv, x, nullptr, gin);
  }
}

TEST_CASE("batchnorm") {
  Rng rng(4);

  SUBCASE("train-mode output is normalized per channel") {
    BatchNorm2d bn("bn", 3);
    Tensor x({4, 3, 5, 5});
    fill_random(x, rng, 2.0);
    for (auto& v : x.data) v += 1.5f;
    auto y = bn.forward(x, true);
    // gamma=1, beta=0 -> per-channel mean 0, var 1
    const std::int64_t plane = 25;
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0, sq = 0.0;
      for (int s = 0; s < 4; ++s) {
        for (std::int64_t i = 0; i < plane; ++i) {
          float v = y.data[static_cast<std::size_t>(((s * 3 + c) * plane) + i)];
          sum += v;
          sq += static_cast<double>(v) * v;
        }
      }
      double mean = sum / (4 * plane);
      double var = sq / (4 * plane) - mean * mean;
      CHECK(mean == doctest::Approx(0.0).epsilon(1e-4));
      CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
    }
  }

  SUBCASE("running stats update toward batch stats") {
    BatchNorm2d bn("bn", 2);
    Tensor x({8, 2, 4, 4});
    fill_random(x, rng);
    for (auto& v : x.data) v = v * 3.0f + 2.0f;
    bn.forward(x, true);
    // momentum 0.1: running_mean = 0.9*0 + 0.1*batch_mean (approx 2)
    CHECK(bn.running_mean().value.data[0] ==
          doctest::Approx(0.2).epsilon(0.25));
    CHECK(bn.running_var().value.data[0] > 0.5);
  }

  SUBCASE("eval mode uses running statistics deterministically") {
    BatchNorm2d bn("bn", 2);
    bn.running_mean().value.data = {1.0f, -1.0f};
    bn.running_var().value.data = {4.0f, 0.25f};
    Tensor x({1, 2, 1, 2});
    x.data = {3.0f, 5.0f, 0.0f, -2.0f};
    auto y = bn.forward(x, false);
    CHECK(y.data[0] == doctest::Approx((3.0 - 1.0) / std::sqrt(4.0 + 1e-5)));
    CHECK(y.data[2] == doctest::Approx((0.0 + 1.0) / std::sqrt(0.25 + 1e-5)));
  }

  SUBCASE("train-mode gradients match finite differences") {
    BatchNorm2d bn("bn", 2);
    Rng r2(5);
    fill_random(bn.gamma().value, r2, 0.5);
    for (auto& v : bn.gamma().value.data) v += 1.0f;
    fill_random(bn.beta().value, r2, 0.2);
    Tensor x({3, 2, 4, 4});
    fill_random(x, r2);

    // Running stats drift across repeated forwards; freeze them by copy.
    auto run_once = [&](Tensor input) {
      auto rm = bn.running_mean().value;
      auto rv = bn.running_var().value;
      auto y = bn.forward(input, true);
      bn.running_mean().value = rm;
      bn.running_var().value = rv;
      return y;
    };

    auto out = run_once(x);
    auto gin = bn.backward(objective_grad(out));

    double num_sq = 0.0, diff_sq = 0.0;
    const double h = 1e-2;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      float saved = x.data[i];
      x.data[i] = saved + static_cast<float>(h);
      double up = objective(run_once(x));
      x.data[i] = saved - static_cast<float>(h);
      double down = objective(run_once(x));
      x.data[i] = saved;
      double fd = (up - down) / (2 * h);
      num_sq += fd * fd;
      diff_sq += (fd - gin.data[i]) * (fd - gin.data[i]);
    }
    CHECK(std::sqrt(diff_sq) / (std::sqrt(num_sq) + 1e-12) < 2e-2);
  }

  SUBCASE("eval-mode backward is the affine scale") {
    BatchNorm2d bn("bn", 2);
    bn.running_var().value.data = {4.0f, 9.0f};
    bn.gamma().value.data = {2.0f, 3.0f};
    Tensor x({1, 2, 2, 2});
    Rng r3(6);
    fill_random(x, r3);
    bn.forward(x, false);
    Tensor g(x.shape);
    for (auto& v : g.data) v = 1.0f;
    auto gin = bn.backward(g);
    CHECK(gin.data[0] == doctest::Approx(2.0 / std::sqrt(4.0 + 1e-5)));
    CHECK(gin.data[4] == doctest::Approx(3.0 / std::sqrt(9.0 + 1e-5)));
  }
}

TEST_CASE("activations") {
  Rng rng(7);

  SUBCASE("relu6 clamps and gates gradients") {
    ReLU6 act;
    Tensor x({1, 1, 1, 5});
    x.data = {-1.0f, 0.5f, 3.0f, 6.5f, 7.0f};
    auto y = act.forward(x, true);
    CHECK(y.data == std::vector<float>{0.0f, 0.5f, 3.0f, 6.0f, 6.0f});
    Tensor g(x.shape);
    for (auto& v : g.data) v = 1.0f;
    auto gin = act.backward(g);
    CHECK(gin.data == std::vector<float>{0.0f, 1.0f, 1.0f, 0.0f, 0.0f});
  }

  SUBCASE("silu gradient matches finite differences") {
    SiLU act;
    Tensor x({2, 3, 4, 4});
    fill_random(x, rng, 2.0);
    auto out = act.forward(x, true);
    auto gin = act.backward(objective_grad(out));
    check_gradient(act, x, nullptr, gin, true, 1e-3, 1e-3);
  }

  SUBCASE("sigmoid gradient matches finite differences") {
    Sigmoid act;
    Tensor x({1, 2, 3, 3});
    fill_random(x, rng, 2.0);
    auto out = act.forward(x, true);
    auto gin = act.backward(objective_grad(out));
    check_gradient(act, x, nullptr, gin, true, 1e-3, 1e-3);
  }
}

TEST_CASE("dropout") {
  Dropout drop("d", 0.2);
  Tensor x({4, 100});
  for (auto& v : x.data) v = 1.0f;

  SUBCASE("eval mode is the identity") {
    auto y = drop.forward(x, false);
    CHECK(y.data == x.data);
  }

  SUBCASE("train mode zeroes about p of the inputs and rescales the rest") {
    drop.reseed(99);
    auto y = drop.forward(x, true);
    int zeros = 0;
    for (float v : y.data) {
      if (v == 0.0f) {
        ++zeros;
      } else {
        CHECK(v == doctest::Approx(1.0 / 0.8));
      }
    }
    double frac = static_cast<double>(zeros) / static_cast<double>(x.numel());
    CHECK(frac > 0.13);
    CHECK(frac < 0.27);
  }

  SUBCASE("same seed, same mask; different seed, different mask") {
    drop.reseed(1);
    auto a = drop.forward(x, true);
    drop.reseed(1);
    auto b = drop.forward(x, true);
    CHECK(a.data == b.data);
    drop.reseed(2);
    auto c = drop.forward(x, true);
    CHECK(a.data != c.data);
  }

  SUBCASE("backward applies the same mask") {
    drop.reseed(5);
    auto y = drop.forward(x, true);
    Tensor g(x.shape);
    for (auto& v : g.data) v = 2.0f;
    auto gin = drop.backward(g);
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      CHECK(gin.data[i] == doctest::Approx(2.0f * y.data[i]));
    }
  }

  SUBCASE("degenerate probabilities rejected") {
    CHECK_THROWS_AS(Dropout("bad", 0.0), Error);
    CHECK_THROWS_AS(Dropout("bad", 1.0), Error);
  }
}

TEST_CASE("pooling") {
  SUBCASE("maxpool forward picks maxima and routes gradients") {
    MaxPool2d pool(2, 2);
    Tensor x({1, 1, 4, 4});
    for (std::size_t i = 0; i < 16; ++i)
      x.data[i] = static_cast<float>(i);
    auto y = pool.forward(x, false);
    CHECK(y.shape == std::vector<int>{1, 1, 2, 2});
    CHECK(y.data == std::vector<float>{5, 7, 13, 15});

    Tensor g(y.shape);
    g.data = {1, 2, 3, 4};
    auto gin = pool.backward(g);
    CHECK(gin.data[5] == 1);
    CHECK(gin.data[7] == 2);
    CHECK(gin.data[13] == 3);
    CHECK(gin.data[15] == 4);
  }

  SUBCASE("maxpool with padding matches resnet stem geometry") {
    MaxPool2d pool(3, 2, 1);
    Tensor x({1, 2, 112, 112});
    auto y = pool.forward(x, false);
    CHECK(y.shape == std::vector<int>{1, 2, 56, 56});
  }

  SUBCASE("global average pool") {
    AdaptiveAvgPool2d pool(1);
    Tensor x({2, 3, 4, 4});
    Rng rng(8);
    fill_random(x, rng);
    auto y = pool.forward(x, false);
    CHECK(y.shape == std::vector<int>{2, 3, 1, 1});
    double expect = 0.0;
    for (int i = 0; i < 16; ++i) expect += x.data[static_cast<std::size_t>(i)];
    CHECK(y.data[0] == doctest::Approx(expect / 16.0));

    auto out = pool.forward(x, true);
    auto gin = pool.backward(objective_grad(out));
    check_gradient(pool, x, nullptr, gin, true, 1e-3, 1e-3);
  }

  SUBCASE("adaptive 7x7 on 7x7 input is the identity") {
    AdaptiveAvgPool2d pool(7);
    Tensor x({1, 2, 7, 7});
    Rng rng(9);
    fill_random(x, rng);
    auto y = pool.forward(x, false);
    CHECK(y.data == x.data);
  }

  SUBCASE("indivisible extent is rejected") {
    AdaptiveAvgPool2d pool(3);
    Tensor x({1, 1, 8, 8});
    CHECK_THROWS_AS(pool.forward(x, false), Error);
  }
}

TEST_CASE("linear") {
  Rng rng(10);
  Linear fc("fc", 6, 3);
  fill_random(fc.weight().value, rng, 0.5);
  fill_random(fc.bias().value, rng, 0.1);
  Tensor x({4, 6});
  fill_random(x, rng);

  SUBCASE("forward matches a hand dot product") {
    auto y = fc.forward(x, false);
    double expect = fc.bias().value.data[1];
    for (int j = 0; j < 6; ++j) {
      expect += x.at2(2, j) * fc.weight().value.at2(1, j);
    }
    CHECK(y.at2(2, 1) == doctest::Approx(expect).epsilon(1e-5));
  }

  SUBCASE("gradients match finite differences") {
    auto out = fc.forward(x, true);
    auto gin = fc.backward(objective_grad(out));
    check_gradient(fc, x, nullptr, gin, true, 1e-3, 1e-3);

    fc.weight().zero_grad();
    fc.bias().zero_grad();
    fc.forward(x, true);
    fc.backward(objective_grad(out));
    check_gradient(fc, x, &fc.weight().value, fc.weight().grad, true, 1e-3,
                   1e-3);
    check_gradient(fc, x, &fc.bias().value, fc.bias().grad, true, 1e-3, 1e-3);
  }

  SUBCASE("shape mismatch rejected") {
    Tensor bad({2, 5});
    CHECK_THROWS_AS(fc.forward(bad, false), Error);
  }
}

TEST_CASE("softmax cross entropy") {
  SUBCASE("uniform logits give ln C and centered gradient") {
    Tensor logits({2, 4});
    auto res = softmax_cross_entropy(logits, {1, 3});
    CHECK(res.loss == doctest::Approx(std::log(4.0)));
    CHECK(res.grad_logits.at2(0, 1) == doctest::Approx((0.25 - 1.0) / 2.0));
    CHECK(res.grad_logits.at2(0, 0) == doctest::Approx(0.25 / 2.0));
  }

  SUBCASE("softmax rows sum to one") {
    Tensor logits({3, 4});
    Rng rng(11);
    fill_random(logits, rng, 5.0);
    auto p = softmax(logits);
    for (int s = 0; s < 3; ++s) {
      double sum = 0.0;
      for (int j = 0; j < 4; ++j) sum += p.at2(s, j);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  SUBCASE("extreme logits stay finite") {
    Tensor logits({1, 4});
    logits.data = {1000.0f, -1000.0f, 0.0f, 500.0f};
    auto res = softmax_cross_entropy(logits, {1});
    CHECK(std::isfinite(res.loss));
    CHECK(res.loss > 100.0);
  }

  SUBCASE("gradient matches finite differences in double") {
    Tensor logits({3, 4});
    Rng rng(12);
    fill_random(logits, rng, 2.0);
    std::vector<int> labels = {2, 0, 3};
    auto res = softmax_cross_entropy(logits, labels);

    const double h = 1e-4;
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
      float saved = logits.data[i];
      logits.data[i] = saved + static_cast<float>(h);
      double up = softmax_cross_entropy(logits, labels).loss;
      logits.data[i] = saved - static_cast<float>(h);
      double down = softmax_cross_entropy(logits, labels).loss;
      logits.data[i] = saved;
      double fd = (up - down) / (2 * h);
      CHECK(res.grad_logits.data[i] == doctest::Approx(fd).epsilon(5e-3));
    }
  }
}

TEST_CASE("sequential composes forward and backward") {
  Rng rng(13);
  Sequential seq;
  seq.add(std::make_unique<Conv2d>("c1", 2, 4, 3, 1, 1));
  seq.add(std::make_unique<BatchNorm2d>("b1", 4));
  seq.add(std::make_unique<ReLU6>());
  seq.add(std::make_unique<AdaptiveAvgPool2d>(1));
  seq.add(std::make_unique<Flatten>());
  seq.add(std::make_unique<Linear>("fc", 4, 3));

  std::vector<Parameter*> params;
  seq.collect_params(params);
  CHECK(params.size() == 5);  // conv W, bn gamma/beta, fc W/b
  for (auto* p : params) fill_random(p->value, rng, 0.3);

  Tensor x({2, 2, 8, 8});
  fill_random(x, rng);
  auto y = seq.forward(x, false);
  CHECK(y.shape == std::vector<int>{2, 3});

  auto res = softmax_cross_entropy(y, {0, 2});
  seq.forward(x, true);
  auto gin = seq.backward(res.grad_logits);
  CHECK(gin.shape == x.shape);
  bool any_nonzero = false;
  for (float v : gin.data) {
    if (v != 0.0f) any_nonzero = true;
  }
  CHECK(any_nonzero);
}
