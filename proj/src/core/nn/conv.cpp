#include "core/nn/conv.hpp"

#include <cstring>

#include "core/common.hpp"
#include "core/nn/gemm.hpp"

namespace mribench::nn {

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int kernel,
               int stride, int padding, int groups, bool with_bias)
    : name_(std::move(name)),
      in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      groups_(groups),
      has_bias_(with_bias),
      depthwise_(groups == in_ch && groups > 1) {
  if (groups_ != 1 && !depthwise_) {
    throw_runtime("Conv2d " + name_ + ": unsupported group count");
  }
  if (depthwise_ && out_ch_ != in_ch_) {
    throw_runtime("Conv2d " + name_ + ": depthwise requires out_ch == in_ch");
  }
  weight_.name = name_ + ".weight";
  weight_.value = Tensor({out_ch_, in_ch_ / groups_, kernel_, kernel_});
  if (has_bias_) {
    bias_.name = name_ + ".bias";
    bias_.value = Tensor({out_ch_});
  }
}

void Conv2d::collect_params(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  if (has_bias_) out.push_back(&bias_);
}

void Conv2d::check_input(const Tensor& x) const {
  if (x.rank() != 4 || x.dim(1) != in_ch_) {
    throw_runtime("Conv2d " + name_ + ": expected (N," +
                  std::to_string(in_ch_) + ",H,W) input, got " +
                  x.shape_str());
  }
}

int Conv2d::out_extent(int in_extent) const {
  return (in_extent + 2 * padding_ - kernel_) / stride_ + 1;
}

namespace {

// cols has (C*k*k) rows and (OH*OW) columns; row index is (c, ky, kx).
void im2col(const float* x, int ch, int h, int w, int kernel, int stride,
            int padding, int oh, int ow, float* cols) {
  for (int c = 0; c < ch; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        float* dst =
            cols + (static_cast<std::size_t>(c) * kernel * kernel +
                    static_cast<std::size_t>(ky) * kernel + kx) *
                       (static_cast<std::size_t>(oh) * ow);
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * stride + ky - padding;
          if (iy < 0 || iy >= h) {
            std::memset(dst, 0, sizeof(float) * static_cast<std::size_t>(ow));
            dst += ow;
            continue;
          }
          const float* src = x + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * stride + kx - padding;
            *dst++ = (ix >= 0 && ix < w) ? src[ix] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_accumulate(const float* cols, int ch, int h, int w, int kernel,
                       int stride, int padding, int oh, int ow, float* x) {
  for (int c = 0; c < ch; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const float* src =
            cols + (static_cast<std::size_t>(c) * kernel * kernel +
                    static_cast<std::size_t>(ky) * kernel + kx) *
                       (static_cast<std::size_t>(oh) * ow);
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * stride + ky - padding;
          if (iy < 0 || iy >= h) {
            src += ow;
            continue;
          }
          float* dst = x + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * stride + kx - padding;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
          src += ow;
        }
      }
    }
  }
}

}  // namespace

Tensor Conv2d::forward(const Tensor& input, bool train) {
  (void)train;
  check_input(input);
  const int n = input.dim(0), h = input.dim(2), w = input.dim(3);
  const int oh = out_extent(h), ow = out_extent(w);
  if (oh <= 0 || ow <= 0) {
    throw_runtime("Conv2d " + name_ + ": input " + input.shape_str() +
                  " too small for kernel");
  }
  cached_input_ = input;

  Tensor out({n, out_ch_, oh, ow});
  const std::size_t in_plane = static_cast<std::size_t>(in_ch_) * h * w;
  const std::size_t out_plane = static_cast<std::size_t>(out_ch_) * oh * ow;
  const int ohw = oh * ow;

  if (depthwise_) {
    for (int s = 0; s < n; ++s) {
      const float* x = input.data.data() + s * in_plane;
      float* y = out.data.data() + s * out_plane;
      for (int c = 0; c < in_ch_; ++c) {
        const float* xp = x + static_cast<std::size_t>(c) * h * w;
        const float* wp = weight_.value.data.data() +
                          static_cast<std::size_t>(c) * kernel_ * kernel_;
        float* yp = y + static_cast<std::size_t>(c) * ohw;
        for (int oy = 0; oy < oh; ++oy) {
          for (int ox = 0; ox < ow; ++ox) {
            float acc = 0.0f;
            for (int ky = 0; ky < kernel_; ++ky) {
              int iy = oy * stride_ + ky - padding_;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < kernel_; ++kx) {
                int ix = ox * stride_ + kx - padding_;
                if (ix < 0 || ix >= w) continue;
                acc += wp[ky * kernel_ + kx] * xp[iy * w + ix];
              }
            }
            yp[oy * ow + ox] = acc;
          }
        }
        if (has_bias_) {
          float b = bias_.value.data[static_cast<std::size_t>(c)];
          for (int i = 0; i < ohw; ++i) yp[i] += b;
        }
      }
    }
    return out;
  }

  const bool pointwise = kernel_ == 1 && stride_ == 1 && padding_ == 0;
  const int ckk = in_ch_ * kernel_ * kernel_;
  if (!pointwise) {
    col_scratch_.resize(static_cast<std::size_t>(ckk) * ohw);
  }
  for (int s = 0; s < n; ++s) {
    const float* x = input.data.data() + s * in_plane;
    float* y = out.data.data() + s * out_plane;
    const float* cols;
    if (pointwise) {
      cols = x;  // im2col of a 1x1/s1/p0 conv is the input itself
    } else {
      im2col(x, in_ch_, h, w, kernel_, stride_, padding_, oh, ow,
             col_scratch_.data());
      cols = col_scratch_.data();
    }
    matmul(weight_.value.data.data(), cols, y, out_ch_, ckk, ohw);
    if (has_bias_) {
      for (int oc = 0; oc < out_ch_; ++oc) {
        float b = bias_.value.data[static_cast<std::size_t>(oc)];
        float* row = y + static_cast<std::size_t>(oc) * ohw;
        for (int i = 0; i < ohw; ++i) row[i] += b;
      }
    }
  }
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_output) {
  if (cached_input_.data.empty()) {
    throw_runtime("Conv2d " + name_ + ": backward before forward");
  }
  const Tensor& input = cached_input_;
  const int n = input.dim(0), h = input.dim(2), w = input.dim(3);
  const int oh = grad_output.dim(2), ow = grad_output.dim(3);
  const int ohw = oh * ow;
  const std::size_t in_plane = static_cast<std::size_t>(in_ch_) * h * w;
  const std::size_t out_plane = static_cast<std::size_t>(out_ch_) * oh * ow;

  weight_.ensure_grad();
  if (has_bias_) bias_.ensure_grad();
  Tensor grad_in(input.shape);

  if (depthwise_) {
    for (int s = 0; s < n; ++s) {
      const float* x = input.data.data() + s * in_plane;
      const float* g = grad_output.data.data() + s * out_plane;
      float* gx = grad_in.data.data() + s * in_plane;
      for (int c = 0; c < in_ch_; ++c) {
        const float* xp = x + static_cast<std::size_t>(c) * h * w;
        const float* gp = g + static_cast<std::size_t>(c) * ohw;
        float* gxp = gx + static_cast<std::size_t>(c) * h * w;
        const float* wp = weight_.value.data.data() +
                          static_cast<std::size_t>(c) * kernel_ * kernel_;
        float* gwp = weight_.grad.data.data() +
                     static_cast<std::size_t>(c) * kernel_ * kernel_;
        for (int oy = 0; oy < oh; ++oy) {
          for (int ox = 0; ox < ow; ++ox) {
            float gv = gp[oy * ow + ox];
            if (gv == 0.0f) continue;
            for (int ky = 0; ky < kernel_; ++ky) {
              int iy = oy * stride_ + ky - padding_;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < kernel_; ++kx) {
                int ix = ox * stride_ + kx - padding_;
                if (ix < 0 || ix >= w) continue;
                gwp[ky * kernel_ + kx] += gv * xp[iy * w + ix];
                gxp[iy * w + ix] += gv * wp[ky * kernel_ + kx];
              }
            }
          }
        }
        if (has_bias_) {
          float acc = 0.0f;
          for (int i = 0; i < ohw; ++i) acc += gp[i];
          bias_.grad.data[static_cast<std::size_t>(c)] += acc;
        }
      }
    }
    cached_input_ = Tensor();
    return grad_in;
  }

  const bool pointwise = kernel_ == 1 && stride_ == 1 && padding_ == 0;
  const int ckk = in_ch_ * kernel_ * kernel_;
  std::vector<float> grad_cols;
  if (!pointwise) {
    col_scratch_.resize(static_cast<std::size_t>(ckk) * ohw);
    grad_cols.resize(static_cast<std::size_t>(ckk) * ohw);
  }

  for (int s = 0; s < n; ++s) {
    const float* x = input.data.data() + s * in_plane;
    const float* g = grad_output.data.data() + s * out_plane;
    float* gx = grad_in.data.data() + s * in_plane;

    const float* cols;
    if (pointwise) {
      cols = x;
    } else {
      im2col(x, in_ch_, h, w, kernel_, stride_, padding_, oh, ow,
             col_scratch_.data());
      cols = col_scratch_.data();
    }
    // dW += G * cols^T
    matmul(g, cols, weight_.grad.data.data(), out_ch_, ohw, ckk,
           /*trans_a=*/false, /*trans_b=*/true, /*accumulate=*/true);
    // dCols = W^T * G
    if (pointwise) {
      matmul(weight_.value.data.data(), g, gx, ckk, out_ch_, ohw,
             /*trans_a=*/true);
    } else {
      matmul(weight_.value.data.data(), g, grad_cols.data(), ckk, out_ch_,
             ohw, /*trans_a=*/true);
      col2im_accumulate(grad_cols.data(), in_ch_, h, w, kernel_, stride_,
                        padding_, oh, ow, gx);
    }
    if (has_bias_) {
      for (int oc = 0; oc < out_ch_; ++oc) {
        const float* row = g + static_cast<std::size_t>(oc) * ohw;
        float acc = 0.0f;
        for (int i = 0; i < ohw; ++i) acc += row[i];
        bias_.grad.data[static_cast<std::size_t>(oc)] += acc;
      }
    }
  }
  cached_input_ = Tensor();
  return grad_in;
}

}  // namespace mribench::nn
