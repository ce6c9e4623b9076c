#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mribench::nn {

// Dense float32 tensor, row-major. Shapes used here are (N,C,H,W) for
// feature maps, (N,F) for features/logits, and 1-2-4D for parameters.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), 0.0f);
  }

  static std::int64_t numel_of(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(shape.size()); }

  float& at4(int n, int c, int h, int w) {
    return data[static_cast<std::size_t>(
        ((static_cast<std::int64_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) +
        w)];
  }
  float at4(int n, int c, int h, int w) const {
    return data[static_cast<std::size_t>(
        ((static_cast<std::int64_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) +
        w)];
  }
  float& at2(int r, int c) {
    return data[static_cast<std::size_t>(
        static_cast<std::int64_t>(r) * dim(1) + c)];
  }
  float at2(int r, int c) const {
    return data[static_cast<std::size_t>(
        static_cast<std::int64_t>(r) * dim(1) + c)];
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  std::string shape_str() const;
};

}  // namespace mribench::nn
