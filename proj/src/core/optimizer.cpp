#include "core/optimizer.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mribench::train {

Adam::Adam(std::vector<nn::Parameter*> params, double beta1, double beta2,
           double eps)
    : Optimizer(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_.resize(params_.size());
  v_.resize(params_.size());
}

void Adam::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter* p = params_[i];
    if (p->grad.data.empty()) continue;
    auto& m = m_[i];
    auto& v = v_[i];
    if (m.empty()) {
      m.assign(p->value.data.size(), 0.0f);
      v.assign(p->value.data.size(), 0.0f);
    }
    for (std::size_t j = 0; j < p->value.data.size(); ++j) {
      double g = p->grad.data[j];
      m[j] = static_cast<float>(beta1_ * m[j] + (1.0 - beta1_) * g);
      v[j] = static_cast<float>(beta2_ * v[j] + (1.0 - beta2_) * g * g);
      double mhat = m[j] / bc1;
      double vhat = v[j] / bc2;
      p->value.data[j] -=
          static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps_));
    }
  }
}

Sgd::Sgd(std::vector<nn::Parameter*> params, double momentum)
    : Optimizer(std::move(params)), momentum_(momentum) {
  velocity_.resize(params_.size());
}

void Sgd::step(double lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter* p = params_[i];
    if (p->grad.data.empty()) continue;
    auto& vel = velocity_[i];
    if (vel.empty()) vel.assign(p->value.data.size(), 0.0f);
    for (std::size_t j = 0; j < p->value.data.size(); ++j) {
      vel[j] = static_cast<float>(momentum_ * vel[j] + p->grad.data[j]);
      p->value.data[j] -= static_cast<float>(lr * vel[j]);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& optimizer_id,
                                          std::vector<nn::Parameter*> params) {
  if (optimizer_id == "adam") return std::make_unique<Adam>(std::move(params));
  if (optimizer_id == "sgd") return std::make_unique<Sgd>(std::move(params));
  throw_config("unknown optimizer '" + optimizer_id +
               "' (valid: adam, sgd)");
}

}  // namespace mribench::train
