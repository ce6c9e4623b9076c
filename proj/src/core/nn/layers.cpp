#include "core/nn/layers.hpp"

#include <cmath>
#include <limits>

#include "core/common.hpp"
#include "core/nn/gemm.hpp"

namespace mribench::nn {

// ---------------------------------------------------------------- BatchNorm

BatchNorm2d::BatchNorm2d(std::string name, int channels, double eps,
                         double momentum)
    : name_(std::move(name)), channels_(channels), eps_(eps),
      momentum_(momentum) {
  gamma_.name = name_ + ".weight";
  gamma_.value = Tensor({channels_});
  for (auto& v : gamma_.value.data) v = 1.0f;
  beta_.name = name_ + ".bias";
  beta_.value = Tensor({channels_});
  running_mean_.name = name_ + ".running_mean";
  running_mean_.value = Tensor({channels_});
  running_var_.name = name_ + ".running_var";
  running_var_.value = Tensor({channels_});
  for (auto& v : running_var_.value.data) v = 1.0f;
}

void BatchNorm2d::collect_params(std::vector<Parameter*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

void BatchNorm2d::collect_buffers(std::vector<BufferState*>& out) {
  out.push_back(&running_mean_);
  out.push_back(&running_var_);
}

void BatchNorm2d::clear_cache() {
  cached_xhat_ = Tensor();
  cached_input_ = Tensor();
  invstd_.clear();
}

Tensor BatchNorm2d::forward(const Tensor& input, bool train) {
  if (input.rank() != 4 || input.dim(1) != channels_) {
    throw_runtime("BatchNorm2d " + name_ + ": bad input " + input.shape_str());
  }
  const int n = input.dim(0), h = input.dim(2), w = input.dim(3);
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  const std::int64_t count = static_cast<std::int64_t>(n) * plane;
  Tensor out(input.shape);
  cached_train_ = train;

  if (train) {
    if (count < 2) {
      throw_runtime("BatchNorm2d " + name_ +
                    ": training needs more than one value per channel");
    }
    invstd_.assign(static_cast<std::size_t>(channels_), 0.0f);
    cached_xhat_ = Tensor(input.shape);
    for (int c = 0; c < channels_; ++c) {
      double sum = 0.0, sq = 0.0;
      for (int s = 0; s < n; ++s) {
        const float* p = input.data.data() +
                         (static_cast<std::int64_t>(s) * channels_ + c) *
                             plane;
        for (std::int64_t i = 0; i < plane; ++i) {
          sum += p[i];
          sq += static_cast<double>(p[i]) * p[i];
        }
      }
      double mean = sum / static_cast<double>(count);
      double var = sq / static_cast<double>(count) - mean * mean;
      if (var < 0.0) var = 0.0;  // numerical floor
      double inv = 1.0 / std::sqrt(var + eps_);
      invstd_[static_cast<std::size_t>(c)] = static_cast<float>(inv);

      double unbiased =
          count > 1 ? var * static_cast<double>(count) / (count - 1) : var;
      auto& rm = running_mean_.value.data[static_cast<std::size_t>(c)];
      auto& rv = running_var_.value.data[static_cast<std::size_t>(c)];
      rm = static_cast<float>((1.0 - momentum_) * rm + momentum_ * mean);
      rv = static_cast<float>((1.0 - momentum_) * rv + momentum_ * unbiased);

      const float g = gamma_.value.data[static_cast<std::size_t>(c)];
      const float b = beta_.value.data[static_cast<std::size_t>(c)];
      const float fmean = static_cast<float>(mean);
      const float finv = static_cast<float>(inv);
      for (int s = 0; s < n; ++s) {
        const std::int64_t base =
            (static_cast<std::int64_t>(s) * channels_ + c) * plane;
        const float* p = input.data.data() + base;
        float* xh = cached_xhat_.data.data() + base;
        float* o = out.data.data() + base;
        for (std::int64_t i = 0; i < plane; ++i) {
          float v = (p[i] - fmean) * finv;
          xh[i] = v;
          o[i] = g * v + b;
        }
      }
    }
  } else {
    cached_input_ = input;
    for (int c = 0; c < channels_; ++c) {
      const float rm = running_mean_.value.data[static_cast<std::size_t>(c)];
      const float rv = running_var_.value.data[static_cast<std::size_t>(c)];
      const float inv = static_cast<float>(1.0 / std::sqrt(rv + eps_));
      const float g = gamma_.value.data[static_cast<std::size_t>(c)];
      const float b = beta_.value.data[static_cast<std::size_t>(c)];
      for (int s = 0; s < n; ++s) {
        const std::int64_t base =
            (static_cast<std::int64_t>(s) * channels_ + c) * plane;
        const float* p = input.data.data() + base;
        float* o = out.data.data() + base;
        for (std::int64_t i = 0; i < plane; ++i) {
          o[i] = g * (p[i] - rm) * inv + b;
        }
      }
    }
  }
  return out;
}

Tensor BatchNorm2d::backward(const Tensor& grad_output) {
  const int n = grad_output.dim(0), h = grad_output.dim(2),
            w = grad_output.dim(3);
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  const std::int64_t count = static_cast<std::int64_t>(n) * plane;
  gamma_.ensure_grad();
  beta_.ensure_grad();
  Tensor grad_in(grad_output.shape);

  if (cached_train_) {
    if (cached_xhat_.data.empty())
      throw_runtime("BatchNorm2d " + name_ + ": backward before forward");
    for (int c = 0; c < channels_; ++c) {
      double sum_g = 0.0, sum_gx = 0.0;
      for (int s = 0; s < n; ++s) {
        const std::int64_t base =
            (static_cast<std::int64_t>(s) * channels_ + c) * plane;
        const float* g = grad_output.data.data() + base;
        const float* xh = cached_xhat_.data.data() + base;
        for (std::int64_t i = 0; i < plane; ++i) {
          sum_g += g[i];
          sum_gx += static_cast<double>(g[i]) * xh[i];
        }
      }
      gamma_.grad.data[static_cast<std::size_t>(c)] +=
          static_cast<float>(sum_gx);
      beta_.grad.data[static_cast<std::size_t>(c)] +=
          static_cast<float>(sum_g);

      const double gam = gamma_.value.data[static_cast<std::size_t>(c)];
      const double inv = invstd_[static_cast<std::size_t>(c)];
      const double scale = gam * inv / static_cast<double>(count);
      for (int s = 0; s < n; ++s) {
        const std::int64_t base =
            (static_cast<std::int64_t>(s) * channels_ + c) * plane;
        const float* g = grad_output.data.data() + base;
        const float* xh = cached_xhat_.data.data() + base;
        float* gi = grad_in.data.data() + base;
        for (std::int64_t i = 0; i < plane; ++i) {
          gi[i] = static_cast<float>(
              scale * (static_cast<double>(count) * g[i] - sum_g -
                       static_cast<double>(xh[i]) * sum_gx));
        }
      }
    }
  } else {
    if (cached_input_.data.empty())
      throw_runtime("BatchNorm2d " + name_ + ": backward before forward");
    for (int c = 0; c < channels_; ++c) {
      const float rm = running_mean_.value.data[static_cast<std::size_t>(c)];
      const float rv = running_var_.value.data[static_cast<std::size_t>(c)];
      const float inv = static_cast<float>(1.0 / std::sqrt(rv + eps_));
      const float gam = gamma_.value.data[static_cast<std::size_t>(c)];
      double sum_g = 0.0, sum_gx = 0.0;
      for (int s = 0; s < n; ++s) {
        const std::int64_t base =
            (static_cast<std::int64_t>(s) * channels_ + c) * plane;
        const float* g = grad_output.data.data() + base;
        const float* p = cached_input_.data.data() + base;
        float* gi = grad_in.data.data() + base;
        for (std::int64_t i = 0; i < plane; ++i) {
          sum_g += g[i];
          sum_gx += static_cast<double>(g[i]) * (p[i] - rm) * inv;
          gi[i] = g[i] * gam * inv;
        }
      }
      gamma_.grad.data[static_cast<std::size_t>(c)] +=
          static_cast<float>(sum_gx);
      beta_.grad.data[static_cast<std::size_t>(c)] +=
          static_cast<float>(sum_g);
    }
  }
  return grad_in;
}

// -------------------------------------------------------------- activations

Tensor ReLU::forward(const Tensor& input, bool) {
  Tensor out(input.shape);
  mask_.assign(input.data.size(), false);
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    if (input.data[i] > 0.0f) {
      out.data[i] = input.data[i];
      mask_[i] = true;
    }
  }
  return out;
}

Tensor ReLU::backward(const Tensor& grad_output) {
  if (mask_.size() != grad_output.data.size())
    throw_runtime("ReLU: backward before forward");
  Tensor grad_in(grad_output.shape);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    if (mask_[i]) grad_in.data[i] = grad_output.data[i];
  }
  return grad_in;
}

Tensor ReLU6::forward(const Tensor& input, bool) {
  cached_input_ = input;
  Tensor out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    float v = input.data[i];
    out.data[i] = v < 0.0f ? 0.0f : (v > 6.0f ? 6.0f : v);
  }
  return out;
}

Tensor ReLU6::backward(const Tensor& grad_output) {
  if (cached_input_.data.size() != grad_output.data.size())
    throw_runtime("ReLU6: backward before forward");
  Tensor grad_in(grad_output.shape);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    float v = cached_input_.data[i];
    if (v > 0.0f && v < 6.0f) grad_in.data[i] = grad_output.data[i];
  }
  cached_input_ = Tensor();
  return grad_in;
}

Tensor SiLU::forward(const Tensor& input, bool) {
  cached_input_ = input;
  Tensor out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    float v = input.data[i];
    out.data[i] = v / (1.0f + std::exp(-v));
  }
  return out;
}

Tensor SiLU::backward(const Tensor& grad_output) {
  if (cached_input_.data.size() != grad_output.data.size())
    throw_runtime("SiLU: backward before forward");
  Tensor grad_in(grad_output.shape);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    float v = cached_input_.data[i];
    float s = 1.0f / (1.0f + std::exp(-v));
    grad_in.data[i] = grad_output.data[i] * (s * (1.0f + v * (1.0f - s)));
  }
  cached_input_ = Tensor();
  return grad_in;
}

Tensor Sigmoid::forward(const Tensor& input, bool) {
  Tensor out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    out.data[i] = 1.0f / (1.0f + std::exp(-input.data[i]));
  }
  cached_output_ = out;
  return out;
}

Tensor Sigmoid::backward(const Tensor& grad_output) {
  if (cached_output_.data.size() != grad_output.data.size())
    throw_runtime("Sigmoid: backward before forward");
  Tensor grad_in(grad_output.shape);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    float s = cached_output_.data[i];
    grad_in.data[i] = grad_output.data[i] * s * (1.0f - s);
  }
  return grad_in;
}

// ------------------------------------------------------------------ dropout

Dropout::Dropout(std::string name, double p) : name_(std::move(name)), p_(p) {
  if (p_ <= 0.0 || p_ >= 1.0) {
    throw_config("Dropout " + name_ + ": probability must be in (0, 1)");
  }
}

Tensor Dropout::forward(const Tensor& input, bool train) {
  if (!train) {
    mask_.clear();
    return input;
  }
  Rng rng(derive_seed({seed_, fnv1a64(name_.data(), name_.size())}));
  const float keep_scale = static_cast<float>(1.0 / (1.0 - p_));
  mask_.assign(input.data.size(), 0.0f);
  Tensor out(input.shape);
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    if (rng.uniform() >= p_) {
      mask_[i] = keep_scale;
      out.data[i] = input.data[i] * keep_scale;
    }
  }
  return out;
}

Tensor Dropout::backward(const Tensor& grad_output) {
  if (mask_.empty()) return grad_output;  // eval-mode passthrough
  if (mask_.size() != grad_output.data.size())
    throw_runtime("Dropout " + name_ + ": backward before forward");
  Tensor grad_in(grad_output.shape);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    grad_in.data[i] = grad_output.data[i] * mask_[i];
  }
  return grad_in;
}

// ------------------------------------------------------------------ pooling

MaxPool2d::MaxPool2d(int kernel, int stride, int padding)
    : kernel_(kernel), stride_(stride), padding_(padding) {}

Tensor MaxPool2d::forward(const Tensor& input, bool) {
  const int n = input.dim(0), c = input.dim(1), h = input.dim(2),
            w = input.dim(3);
  const int oh = (h + 2 * padding_ - kernel_) / stride_ + 1;
  const int ow = (w + 2 * padding_ - kernel_) / stride_ + 1;
  input_shape_ = input.shape;
  Tensor out({n, c, oh, ow});
  argmax_.assign(out.data.size(), -1);

  std::int64_t o = 0;
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      const float* plane = input.data.data() +
                           (static_cast<std::int64_t>(s) * c + ch) * h * w;
      const std::int64_t plane_off =
          (static_cast<std::int64_t>(s) * c + ch) * h * w;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          float best = -std::numeric_limits<float>::infinity();
          std::int64_t best_idx = -1;
          for (int ky = 0; ky < kernel_; ++ky) {
            int iy = oy * stride_ + ky - padding_;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              int ix = ox * stride_ + kx - padding_;
              if (ix < 0 || ix >= w) continue;
              float v = plane[iy * w + ix];
              if (v > best) {
                best = v;
                best_idx = plane_off + iy * w + ix;
              }
            }
          }
          out.data[static_cast<std::size_t>(o)] = best;
          argmax_[static_cast<std::size_t>(o)] = best_idx;
          ++o;
        }
      }
    }
  }
  return out;
}

Tensor MaxPool2d::backward(const Tensor& grad_output) {
  if (argmax_.size() != grad_output.data.size())
    throw_runtime("MaxPool2d: backward before forward");
  Tensor grad_in(input_shape_);
  for (std::size_t i = 0; i < grad_output.data.size(); ++i) {
    if (argmax_[i] >= 0)
      grad_in.data[static_cast<std::size_t>(argmax_[i])] +=
          grad_output.data[i];
  }
  return grad_in;
}

AdaptiveAvgPool2d::AdaptiveAvgPool2d(int output_size)
    : output_size_(output_size) {}

Tensor AdaptiveAvgPool2d::forward(const Tensor& input, bool) {
  const int n = input.dim(0), c = input.dim(1), h = input.dim(2),
            w = input.dim(3);
  if (h % output_size_ != 0 || w % output_size_ != 0) {
    throw_runtime("AdaptiveAvgPool2d: input " + input.shape_str() +
                  " is not divisible by output size " +
                  std::to_string(output_size_));
  }
  input_shape_ = input.shape;
  const int cell_h = h / output_size_, cell_w = w / output_size_;
  Tensor out({n, c, output_size_, output_size_});
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      const float* plane = input.data.data() +
                           (static_cast<std::int64_t>(s) * c + ch) * h * w;
      float* oplane = out.data.data() +
                      (static_cast<std::int64_t>(s) * c + ch) * output_size_ *
                          output_size_;
      for (int oy = 0; oy < output_size_; ++oy) {
        for (int ox = 0; ox < output_size_; ++ox) {
          double acc = 0.0;
          for (int iy = oy * cell_h; iy < (oy + 1) * cell_h; ++iy) {
            for (int ix = ox * cell_w; ix < (ox + 1) * cell_w; ++ix) {
              acc += plane[iy * w + ix];
            }
          }
          oplane[oy * output_size_ + ox] =
              static_cast<float>(acc / (cell_h * cell_w));
        }
      }
    }
  }
  return out;
}

Tensor AdaptiveAvgPool2d::backward(const Tensor& grad_output) {
  if (input_shape_.empty())
    throw_runtime("AdaptiveAvgPool2d: backward before forward");
  const int n = input_shape_[0], c = input_shape_[1], h = input_shape_[2],
            w = input_shape_[3];
  const int cell_h = h / output_size_, cell_w = w / output_size_;
  const float inv = 1.0f / static_cast<float>(cell_h * cell_w);
  Tensor grad_in({n, c, h, w});
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      float* gplane = grad_in.data.data() +
                      (static_cast<std::int64_t>(s) * c + ch) * h * w;
      const float* oplane =
          grad_output.data.data() +
          (static_cast<std::int64_t>(s) * c + ch) * output_size_ *
              output_size_;
      for (int oy = 0; oy < output_size_; ++oy) {
        for (int ox = 0; ox < output_size_; ++ox) {
          float g = oplane[oy * output_size_ + ox] * inv;
          for (int iy = oy * cell_h; iy < (oy + 1) * cell_h; ++iy) {
            for (int ix = ox * cell_w; ix < (ox + 1) * cell_w; ++ix) {
              gplane[iy * w + ix] += g;
            }
          }
        }
      }
    }
  }
  return grad_in;
}

// ------------------------------------------------------------------ linear

Tensor Flatten::forward(const Tensor& input, bool) {
  input_shape_ = input.shape;
  Tensor out = input;
  int n = input.dim(0);
  out.shape = {n, static_cast<int>(input.numel() / n)};
  return out;
}

Tensor Flatten::backward(const Tensor& grad_output) {
  if (input_shape_.empty()) throw_runtime("Flatten: backward before forward");
  Tensor grad_in = grad_output;
  grad_in.shape = input_shape_;
  return grad_in;
}

Linear::Linear(std::string name, int in_features, int out_features,
               bool with_bias)
    : name_(std::move(name)),
      in_features_(in_features),
      out_features_(out_features),
      has_bias_(with_bias) {
  weight_.name = name_ + ".weight";
  weight_.value = Tensor({out_features_, in_features_});
  if (has_bias_) {
    bias_.name = name_ + ".bias";
    bias_.value = Tensor({out_features_});
  }
}

void Linear::collect_params(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  if (has_bias_) out.push_back(&bias_);
}

Tensor Linear::forward(const Tensor& input, bool) {
  if (input.rank() != 2 || input.dim(1) != in_features_) {
    throw_runtime("Linear " + name_ + ": expected (N," +
                  std::to_string(in_features_) + ") input, got " +
                  input.shape_str());
  }
  cached_input_ = input;
  const int n = input.dim(0);
  Tensor out({n, out_features_});
  // out = x * W^T
  matmul(input.data.data(), weight_.value.data.data(), out.data.data(), n,
         in_features_, out_features_, /*trans_a=*/false, /*trans_b=*/true);
  if (has_bias_) {
    for (int s = 0; s < n; ++s) {
      float* row = out.data.data() + static_cast<std::size_t>(s) *
                                         static_cast<std::size_t>(
                                             out_features_);
      for (int j = 0; j < out_features_; ++j)
        row[j] += bias_.value.data[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

Tensor Linear::backward(const Tensor& grad_output) {
  if (cached_input_.data.empty())
    throw_runtime("Linear " + name_ + ": backward before forward");
  const int n = grad_output.dim(0);
  weight_.ensure_grad();
  if (has_bias_) bias_.ensure_grad();

  // dW += G^T * X
  matmul(grad_output.data.data(), cached_input_.data.data(),
         weight_.grad.data.data(), out_features_, n, in_features_,
         /*trans_a=*/true, /*trans_b=*/false, /*accumulate=*/true);
  if (has_bias_) {
    for (int s = 0; s < n; ++s) {
      const float* row = grad_output.data.data() +
                         static_cast<std::size_t>(s) *
                             static_cast<std::size_t>(out_features_);
      for (int j = 0; j < out_features_; ++j)
        bias_.grad.data[static_cast<std::size_t>(j)] += row[j];
    }
  }
  // dX = G * W
  Tensor grad_in({n, in_features_});
  matmul(grad_output.data.data(), weight_.value.data.data(),
         grad_in.data.data(), n, out_features_, in_features_);
  cached_input_ = Tensor();
  return grad_in;
}

void Sequential::reseed(std::uint64_t seed) {
  std::uint64_t i = 0;
  for (auto& m : children_) {
    m->reseed(derive_seed({seed, i++}));
  }
}

}  // namespace mribench::nn
