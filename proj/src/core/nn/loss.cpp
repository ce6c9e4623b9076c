#include "core/nn/loss.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mribench::nn {

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw_runtime("softmax: expected (N,C) logits");
  const int n = logits.dim(0), c = logits.dim(1);
  Tensor probs(logits.shape);
  for (int s = 0; s < n; ++s) {
    const float* row = logits.data.data() +
                       static_cast<std::size_t>(s) * static_cast<std::size_t>(c);
    float* out = probs.data.data() +
                 static_cast<std::size_t>(s) * static_cast<std::size_t>(c);
    double maxv = row[0];
    for (int j = 1; j < c; ++j) maxv = std::max<double>(maxv, row[j]);
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(row[j] - maxv);
    for (int j = 0; j < c; ++j) {
      out[j] = static_cast<float>(std::exp(row[j] - maxv) / denom);
    }
  }
  return probs;
}

LossResult softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels) {
  if (logits.rank() != 2) {
    throw_runtime("softmax_cross_entropy: expected (N,C) logits, got " +
                  logits.shape_str());
  }
  const int n = logits.dim(0), c = logits.dim(1);
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw_runtime("softmax_cross_entropy: batch/label size mismatch");
  }

  LossResult res;
  res.probabilities = softmax(logits);
  res.grad_logits = Tensor(logits.shape);

  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    int label = labels[static_cast<std::size_t>(s)];
    if (label < 0 || label >= c)
      throw_runtime("softmax_cross_entropy: label out of range");
    const float* row = logits.data.data() +
                       static_cast<std::size_t>(s) * static_cast<std::size_t>(c);
    // log-sum-exp evaluated directly for a stable -log p.
    double maxv = row[0];
    for (int j = 1; j < c; ++j) maxv = std::max<double>(maxv, row[j]);
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(row[j] - maxv);
    total += std::log(denom) - (row[label] - maxv);

    const float* p = res.probabilities.data.data() +
                     static_cast<std::size_t>(s) * static_cast<std::size_t>(c);
    float* g = res.grad_logits.data.data() +
               static_cast<std::size_t>(s) * static_cast<std::size_t>(c);
    for (int j = 0; j < c; ++j) {
      g[j] = (p[j] - (j == label ? 1.0f : 0.0f)) / static_cast<float>(n);
    }
  }
  res.loss = total / n;
  return res;
}

}  // namespace mribench::nn
