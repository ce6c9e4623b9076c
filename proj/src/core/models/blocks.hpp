#pragma once

#include <memory>
#include <string>

#include "core/nn/conv.hpp"
#include "core/nn/layers.hpp"
#include "core/nn/module.hpp"

namespace mribench::zoo {

// conv -> batchnorm -> activation, the standard fused unit. Activation may
// be empty (projection convs).
std::unique_ptr<nn::Sequential> conv_bn_act(
    const std::string& conv_name, const std::string& bn_name, int in_ch,
    int out_ch, int kernel, int stride, int groups,
    std::unique_ptr<nn::Module> activation);

// MobileNetV2 inverted residual: optional 1x1 expansion, depthwise 3x3,
// linear 1x1 projection, with a skip connection when stride is 1 and the
// channel count is preserved. Fully differentiable; this is the block that
// gets fine-tuned end to end.
class InvertedResidual : public nn::Module {
 public:
  InvertedResidual(const std::string& prefix, int in_ch, int out_ch,
                   int stride, int expand_ratio);

  nn::Tensor forward(const nn::Tensor& input, bool train) override;
  nn::Tensor backward(const nn::Tensor& grad_output) override;
  void collect_params(std::vector<nn::Parameter*>& out) override;
  void collect_buffers(std::vector<nn::BufferState*>& out) override;
  void reseed(std::uint64_t seed) override;
  void clear_cache() override;

 private:
  nn::Sequential path_;
  bool use_skip_;
};

// ResNet basic block: two 3x3 conv/bn pairs with an identity or projection
// shortcut and post-add ReLU.
class BasicBlock : public nn::Module {
 public:
  BasicBlock(const std::string& prefix, int in_ch, int out_ch, int stride);

  nn::Tensor forward(const nn::Tensor& input, bool train) override;
  nn::Tensor backward(const nn::Tensor& grad_output) override;
  void collect_params(std::vector<nn::Parameter*>& out) override;
  void collect_buffers(std::vector<nn::BufferState*>& out) override;
  void clear_cache() override;

 private:
  nn::Sequential path_;                     // conv1 bn1 relu conv2 bn2
  std::unique_ptr<nn::Sequential> shortcut_;  // downsample, when shapes change
  nn::ReLU post_relu_;
  nn::Tensor cached_sum_;
};

// Squeeze-and-excitation gate: global pool -> 1x1 reduce -> SiLU ->
// 1x1 expand -> sigmoid -> channelwise scale.
class SqueezeExcite : public nn::Module {
 public:
  SqueezeExcite(const std::string& prefix, int channels, int squeeze_ch);

  nn::Tensor forward(const nn::Tensor& input, bool train) override;
  nn::Tensor backward(const nn::Tensor& grad_output) override;
  void collect_params(std::vector<nn::Parameter*>& out) override;
  void clear_cache() override;

 private:
  nn::AdaptiveAvgPool2d pool_{1};
  nn::Conv2d fc1_;
  nn::SiLU act_;
  nn::Conv2d fc2_;
  nn::Sigmoid gate_;
};

// EfficientNet MBConv. Forward-only: EfficientNet-B0 participates in frozen
// transfer, never in full fine-tuning.
class MBConv : public nn::Module {
 public:
  MBConv(const std::string& prefix, int in_ch, int out_ch, int kernel,
         int stride, int expand_ratio);

  nn::Tensor forward(const nn::Tensor& input, bool train) override;
  nn::Tensor backward(const nn::Tensor& grad_output) override;
  void collect_params(std::vector<nn::Parameter*>& out) override;
  void collect_buffers(std::vector<nn::BufferState*>& out) override;
  void clear_cache() override;

 private:
  nn::Sequential path_;
  bool use_skip_;
};

}  // namespace mribench::zoo
