#pragma once

#include <vector>

#include "core/nn/tensor.hpp"

namespace mribench::nn {

struct LossResult {
  double loss = 0.0;          // mean cross-entropy per sample
  Tensor grad_logits;         // d(mean loss)/d(logits), (N, num_classes)
  Tensor probabilities;       // softmax rows, (N, num_classes)
};

// Numerically stable softmax cross-entropy over logits (N, C) with integer
// labels. Gradient is (softmax - onehot) / N.
LossResult softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels);

Tensor softmax(const Tensor& logits);

}  // namespace mribench::nn
