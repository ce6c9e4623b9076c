#pragma once

#include <string>
#include <vector>

#include "core/nn/module.hpp"

namespace mribench::nn {

// 2D convolution over NCHW, square kernels. groups is either 1 or in_ch
// (depthwise); that covers every backbone built here. Weight layout is
// (out_ch, in_ch/groups, k, k).
class Conv2d : public Module {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int kernel, int stride,
         int padding, int groups = 1, bool with_bias = false);

  Tensor forward(const Tensor& input, bool train) override;
  Tensor backward(const Tensor& grad_output) override;

  void collect_params(std::vector<Parameter*>& out) override;
  void clear_cache() override { cached_input_ = Tensor(); }

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  bool has_bias() const { return has_bias_; }
  int out_channels() const { return out_ch_; }

 private:
  void check_input(const Tensor& x) const;
  int out_extent(int in_extent) const;

  std::string name_;
  int in_ch_, out_ch_, kernel_, stride_, padding_, groups_;
  bool has_bias_;
  bool depthwise_;
  Parameter weight_;
  Parameter bias_;
  Tensor cached_input_;
  std::vector<float> col_scratch_;
};

}  // namespace mribench::nn
