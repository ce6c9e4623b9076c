#include "core/models/blocks.hpp"

#include "core/common.hpp"

namespace mribench::zoo {

using nn::BatchNorm2d;
using nn::Conv2d;
using nn::Module;
using nn::Parameter;
using nn::Sequential;
using nn::Tensor;

std::unique_ptr<Sequential> conv_bn_act(const std::string& conv_name,
                                        const std::string& bn_name, int in_ch,
                                        int out_ch, int kernel, int stride,
                                        int groups,
                                        std::unique_ptr<Module> activation) {
  auto seq = std::make_unique<Sequential>();
  seq->add(std::make_unique<Conv2d>(conv_name, in_ch, out_ch, kernel, stride,
                                    (kernel - 1) / 2, groups,
                                    /*with_bias=*/false));
  seq->add(std::make_unique<BatchNorm2d>(bn_name, out_ch));
  if (activation) seq->add(std::move(activation));
  return seq;
}

// ------------------------------------------------------- InvertedResidual

InvertedResidual::InvertedResidual(const std::string& prefix, int in_ch,
                                   int out_ch, int stride, int expand_ratio) {
  const int hidden = in_ch * expand_ratio;
  use_skip_ = stride == 1 && in_ch == out_ch;

  int idx = 0;
  if (expand_ratio != 1) {
    path_.add(conv_bn_act(prefix + ".0.0", prefix + ".0.1", in_ch, hidden, 1,
                          1, 1, std::make_unique<nn::ReLU6>()));
    idx = 1;
  }
  path_.add(conv_bn_act(prefix + "." + std::to_string(idx) + ".0",
                        prefix + "." + std::to_string(idx) + ".1", hidden,
                        hidden, 3, stride, hidden,
                        std::make_unique<nn::ReLU6>()));
  ++idx;
  path_.add(std::make_unique<Conv2d>(prefix + "." + std::to_string(idx),
                                     hidden, out_ch, 1, 1, 0, 1, false));
  ++idx;
  path_.add(std::make_unique<BatchNorm2d>(prefix + "." + std::to_string(idx),
                                          out_ch));
}

Tensor InvertedResidual::forward(const Tensor& input, bool train) {
  Tensor out = path_.forward(input, train);
  if (use_skip_) {
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] += input.data[i];
  }
  return out;
}

Tensor InvertedResidual::backward(const Tensor& grad_output) {
  Tensor grad_in = path_.backward(grad_output);
  if (use_skip_) {
    for (std::size_t i = 0; i < grad_in.data.size(); ++i)
      grad_in.data[i] += grad_output.data[i];
  }
  return grad_in;
}

void InvertedResidual::collect_params(std::vector<Parameter*>& out) {
  path_.collect_params(out);
}
void InvertedResidual::collect_buffers(std::vector<nn::BufferState*>& out) {
  path_.collect_buffers(out);
}
void InvertedResidual::reseed(std::uint64_t seed) { path_.reseed(seed); }
void InvertedResidual::clear_cache() { path_.clear_cache(); }

// ------------------------------------------------------------- BasicBlock

BasicBlock::BasicBlock(const std::string& prefix, int in_ch, int out_ch,
                       int stride) {
  path_.add(std::make_unique<Conv2d>(prefix + ".conv1", in_ch, out_ch, 3,
                                     stride, 1, 1, false));
  path_.add(std::make_unique<BatchNorm2d>(prefix + ".bn1", out_ch));
  path_.add(std::make_unique<nn::ReLU>());
  path_.add(std::make_unique<Conv2d>(prefix + ".conv2", out_ch, out_ch, 3, 1,
                                     1, 1, false));
  path_.add(std::make_unique<BatchNorm2d>(prefix + ".bn2", out_ch));

  if (stride != 1 || in_ch != out_ch) {
    shortcut_ = std::make_unique<Sequential>();
    shortcut_->add(std::make_unique<Conv2d>(prefix + ".downsample.0", in_ch,
                                            out_ch, 1, stride, 0, 1, false));
    shortcut_->add(std::make_unique<BatchNorm2d>(prefix + ".downsample.1",
                                                 out_ch));
  }
}

Tensor BasicBlock::forward(const Tensor& input, bool train) {
  Tensor out = path_.forward(input, train);
  Tensor identity = shortcut_ ? shortcut_->forward(input, train) : input;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += identity.data[i];
  return post_relu_.forward(out, train);
}

Tensor BasicBlock::backward(const Tensor& grad_output) {
  Tensor g = post_relu_.backward(grad_output);
  Tensor grad_in = path_.backward(g);
  if (shortcut_) {
    Tensor short_grad = shortcut_->backward(g);
    for (std::size_t i = 0; i < grad_in.data.size(); ++i)
      grad_in.data[i] += short_grad.data[i];
  } else {
    for (std::size_t i = 0; i < grad_in.data.size(); ++i)
      grad_in.data[i] += g.data[i];
  }
  return grad_in;
}

void BasicBlock::collect_params(std::vector<Parameter*>& out) {
  path_.collect_params(out);
  if (shortcut_) shortcut_->collect_params(out);
}
void BasicBlock::collect_buffers(std::vector<nn::BufferState*>& out) {
  path_.collect_buffers(out);
  if (shortcut_) shortcut_->collect_buffers(out);
}
void BasicBlock::clear_cache() {
  path_.clear_cache();
  if (shortcut_) shortcut_->clear_cache();
  post_relu_.clear_cache();
  cached_sum_ = Tensor();
}

// ----------------------------------------------------------- SqueezeExcite

SqueezeExcite::SqueezeExcite(const std::string& prefix, int channels,
                             int squeeze_ch)
    : fc1_(prefix + ".fc1", channels, squeeze_ch, 1, 1, 0, 1, true),
      fc2_(prefix + ".fc2", squeeze_ch, channels, 1, 1, 0, 1, true) {}

Tensor SqueezeExcite::forward(const Tensor& input, bool train) {
  Tensor pooled = pool_.forward(input, train);
  Tensor gate = gate_.forward(
      fc2_.forward(act_.forward(fc1_.forward(pooled, train), train), train),
      train);
  const int n = input.dim(0), c = input.dim(1);
  const std::int64_t plane =
      static_cast<std::int64_t>(input.dim(2)) * input.dim(3);
  Tensor out(input.shape);
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      float scale =
          gate.data[static_cast<std::size_t>(s) * static_cast<std::size_t>(c) +
                    static_cast<std::size_t>(ch)];
      const float* src = input.data.data() +
                         (static_cast<std::int64_t>(s) * c + ch) * plane;
      float* dst = out.data.data() +
                   (static_cast<std::int64_t>(s) * c + ch) * plane;
      for (std::int64_t i = 0; i < plane; ++i) dst[i] = src[i] * scale;
    }
  }
  return out;
}

Tensor SqueezeExcite::backward(const Tensor&) {
  throw_runtime(
      "SqueezeExcite: backward unsupported (EfficientNet-B0 is used as a "
      "frozen backbone only)");
}

void SqueezeExcite::collect_params(std::vector<Parameter*>& out) {
  fc1_.collect_params(out);
  fc2_.collect_params(out);
}
void SqueezeExcite::clear_cache() {
  fc1_.clear_cache();
  fc2_.clear_cache();
  act_.clear_cache();
  gate_.clear_cache();
}

// ----------------------------------------------------------------- MBConv

MBConv::MBConv(const std::string& prefix, int in_ch, int out_ch, int kernel,
               int stride, int expand_ratio) {
  const int hidden = in_ch * expand_ratio;
  const int squeeze_ch = std::max(1, in_ch / 4);
  use_skip_ = stride == 1 && in_ch == out_ch;

  int idx = 0;
  if (expand_ratio != 1) {
    path_.add(conv_bn_act(prefix + ".block.0.0", prefix + ".block.0.1", in_ch,
                          hidden, 1, 1, 1, std::make_unique<nn::SiLU>()));
    idx = 1;
  }
  path_.add(conv_bn_act(prefix + ".block." + std::to_string(idx) + ".0",
                        prefix + ".block." + std::to_string(idx) + ".1",
                        hidden, hidden, kernel, stride, hidden,
                        std::make_unique<nn::SiLU>()));
  ++idx;
  path_.add(std::make_unique<SqueezeExcite>(
      prefix + ".block." + std::to_string(idx), hidden, squeeze_ch));
  ++idx;
  path_.add(conv_bn_act(prefix + ".block." + std::to_string(idx) + ".0",
                        prefix + ".block." + std::to_string(idx) + ".1",
                        hidden, out_ch, 1, 1, 1, nullptr));
}

Tensor MBConv::forward(const Tensor& input, bool train) {
  Tensor out = path_.forward(input, train);
  if (use_skip_) {
    // Stochastic depth is identity at inference; the frozen backbone always
    // runs in inference mode.
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] += input.data[i];
  }
  return out;
}

Tensor MBConv::backward(const Tensor&) {
  throw_runtime(
      "MBConv: backward unsupported (EfficientNet-B0 is used as a frozen "
      "backbone only)");
}

void MBConv::collect_params(std::vector<Parameter*>& out) {
  path_.collect_params(out);
}
void MBConv::collect_buffers(std::vector<nn::BufferState*>& out) {
  path_.collect_buffers(out);
}
void MBConv::clear_cache() { path_.clear_cache(); }

}  // namespace mribench::zoo
