#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/nn/module.hpp"

namespace mribench::train {

// Updates only the parameters it was handed (the trainable set). A parameter
// whose gradient was never accumulated is skipped.
class Optimizer {
 public:
  explicit Optimizer(std::vector<nn::Parameter*> params)
      : params_(std::move(params)) {}
  virtual ~Optimizer() = default;

  virtual void step(double lr) = 0;

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

 protected:
  std::vector<nn::Parameter*> params_;
};

// Adaptive-moment estimation with the conventional defaults
// (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam : public Optimizer {
 public:
  explicit Adam(std::vector<nn::Parameter*> params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void step(double lr) override;

 private:
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<float>> m_, v_;
};

class Sgd : public Optimizer {
 public:
  explicit Sgd(std::vector<nn::Parameter*> params, double momentum = 0.9);
  void step(double lr) override;

 private:
  double momentum_;
  std::vector<std::vector<float>> velocity_;
};

std::unique_ptr<Optimizer> make_optimizer(const std::string& optimizer_id,
                                          std::vector<nn::Parameter*> params);

}  // namespace mribench::train
