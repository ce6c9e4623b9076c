#pragma once

#include <string>
#include <vector>

#include "core/nn/module.hpp"
#include "core/rng.hpp"

namespace mribench::nn {

class BatchNorm2d : public Module {
 public:
  BatchNorm2d(std::string name, int channels, double eps = 1e-5,
              double momentum = 0.1);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;

  void collect_params(std::vector<Parameter*>& out) override;
  void collect_buffers(std::vector<BufferState*>& out) override;
  void clear_cache() override;

  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }
  BufferState& running_mean() { return running_mean_; }
  BufferState& running_var() { return running_var_; }

 private:
  std::string name_;
  int channels_;
  double eps_, momentum_;
  Parameter gamma_, beta_;
  BufferState running_mean_, running_var_;

  bool cached_train_ = false;
  Tensor cached_xhat_;          // train mode
  std::vector<float> invstd_;   // per channel
  Tensor cached_input_;         // eval mode (for grads w.r.t. gamma)
};

class ReLU : public Module {
 public:
  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void clear_cache() override { mask_.clear(); }

 private:
  std::vector<bool> mask_;
};

// Clamps to [0, 6]; the MobileNetV2 activation.
class ReLU6 : public Module {
 public:
  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void clear_cache() override { cached_input_ = Tensor(); }

 private:
  Tensor cached_input_;
};

// x * sigmoid(x); the EfficientNet activation.
class SiLU : public Module {
 public:
  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void clear_cache() override { cached_input_ = Tensor(); }

 private:
  Tensor cached_input_;
};

class Sigmoid : public Module {
 public:
  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void clear_cache() override { cached_output_ = Tensor(); }

 private:
  Tensor cached_output_;
};

// Inverted dropout. Inactive in eval mode. The owning model reseeds the
// layer before every training forward so masks are a pure function of
// (run seed, epoch, step).
class Dropout : public Module {
 public:
  Dropout(std::string name, double p);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void reseed(std::uint64_t seed) override { seed_ = seed; }
  void clear_cache() override { mask_.clear(); }

  double prob() const { return p_; }

 private:
  std::string name_;
  double p_;
  std::uint64_t seed_ = 0;
  std::vector<float> mask_;  // scale factors, 0 or 1/(1-p)
};

class MaxPool2d : public Module {
 public:
  MaxPool2d(int kernel, int stride, int padding = 0);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;
  void clear_cache() override { argmax_.clear(); }

 private:
  int kernel_, stride_, padding_;
  std::vector<int> input_shape_;
  std::vector<std::int64_t> argmax_;
};

// Averages over cells; output_size must divide the input extent evenly
// (which holds throughout these backbones, including global pooling to 1x1).
class AdaptiveAvgPool2d : public Module {
 public:
  explicit AdaptiveAvgPool2d(int output_size);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  int output_size_;
  std::vector<int> input_shape_;
};

// (N,C,H,W) -> (N, C*H*W)
class Flatten : public Module {
 public:
  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  std::vector<int> input_shape_;
};

class Linear : public Module {
 public:
  Linear(std::string name, int in_features, int out_features,
         bool with_bias = true);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;

  void collect_params(std::vector<Parameter*>& out) override;
  void clear_cache() override { cached_input_ = Tensor(); }

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  int in_features() const { return in_features_; }
  int out_features() const { return out_features_; }

 private:
  std::string name_;
  int in_features_, out_features_;
  bool has_bias_;
  Parameter weight_;  // (out, in)
  Parameter bias_;
  Tensor cached_input_;
};

}  // namespace mribench::nn
