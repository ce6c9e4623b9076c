#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/nn/tensor.hpp"

namespace mribench::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // allocated on first accumulation, trainable params only
  bool trainable = true;

  void ensure_grad() {
    if (grad.shape != value.shape) {
      grad = Tensor(value.shape);
    }
  }
  void zero_grad() {
    for (auto& g : grad.data) g = 0.0f;
  }
};

// Non-learnable state persisted in checkpoints (batch-norm running stats).
struct BufferState {
  std::string name;
  Tensor value;
};

// Layers cache what backward needs during forward; backward consumes the
// cache and accumulates parameter gradients. A module owned by a frozen
// backbone never sees backward().
class Module {
 public:
  virtual ~Module() = default;

  virtual Tensor forward(const Tensor& input, bool train) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;

  virtual void collect_params(std::vector<Parameter*>& out) { (void)out; }
  virtual void collect_buffers(std::vector<BufferState*>& out) { (void)out; }

  // Reseeds stochastic layers (dropout) for the next forward pass.
  virtual void reseed(std::uint64_t seed) { (void)seed; }

  virtual void clear_cache() {}
};

class Sequential : public Module {
 public:
  Sequential() = default;

  void add(std::unique_ptr<Module> m) { children_.push_back(std::move(m)); }
  std::size_t size() const { return children_.size(); }
  Module& child(std::size_t i) { return *children_[i]; }

  Tensor forward(const Tensor& input, bool train) override {
    Tensor x = input;
    for (auto& m : children_) x = m->forward(x, train);
    return x;
  }

  Tensor backward(const Tensor& grad_output) override {
    Tensor g = grad_output;
    for (auto it = children_.rbegin(); it != children_.rend(); ++it) {
      g = (*it)->backward(g);
    }
    return g;
  }

  void collect_params(std::vector<Parameter*>& out) override {
    for (auto& m : children_) m->collect_params(out);
  }
  void collect_buffers(std::vector<BufferState*>& out) override {
    for (auto& m : children_) m->collect_buffers(out);
  }
  void reseed(std::uint64_t seed) override;
  void clear_cache() override {
    for (auto& m : children_) m->clear_cache();
  }

 private:
  std::vector<std::unique_ptr<Module>> children_;
};

}  // namespace mribench::nn
