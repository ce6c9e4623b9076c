#include "core/models/zoo.hpp"

#include <cmath>
#include <cstdlib>

#include "core/common.hpp"
#include "core/models/weights_io.hpp"
#include "core/rng.hpp"

namespace mribench::zoo {

using nn::Dropout;
using nn::Linear;
using nn::Parameter;
using nn::Sequential;
using nn::Tensor;

const std::vector<std::string>& known_model_ids() {
  static const std::vector<std::string> ids = {
      "mobilenet_v2", "resnet18", "efficientnet_b0", "vgg16", "mobilenet_bt"};
  return ids;
}

ModelSpec spec_for_model_id(const std::string& model_id) {
  ModelSpec spec;
  spec.model_id = model_id;
  if (model_id == "mobilenet_v2") {
    spec.backbone = BackboneId::kMobileNetV2;
  } else if (model_id == "resnet18") {
    spec.backbone = BackboneId::kResNet18;
  } else if (model_id == "efficientnet_b0") {
    spec.backbone = BackboneId::kEfficientNetB0;
  } else if (model_id == "vgg16") {
    spec.backbone = BackboneId::kVgg16;
  } else if (model_id == "mobilenet_bt") {
    spec.backbone = BackboneId::kMobileNetV2;
    spec.freeze = FreezePolicy::kUnfreezeAll;
    spec.custom_head = true;
  } else {
    std::string valid;
    for (const auto& id : known_model_ids()) {
      if (!valid.empty()) valid += ", ";
      valid += id;
    }
    throw_config("unknown model id '" + model_id + "' (valid ids: " + valid +
                 ")");
  }
  return spec;
}

std::filesystem::path default_weights_dir() {
  if (const char* env = std::getenv("MRIBENCH_WEIGHTS_DIR")) {
    return env;
  }
  return "weights";
}

// ---------------------------------------------------------------- Model

Model::Model(ModelSpec spec, BackboneBundle bundle)
    : spec_(std::move(spec)),
      trunk_(std::move(bundle.trunk)),
      feature_width_(bundle.transfer_width) {
  const bool trainable_trunk = spec_.freeze == FreezePolicy::kUnfreezeAll;
  std::vector<Parameter*> trunk_params;
  trunk_->collect_params(trunk_params);
  for (auto* p : trunk_params) p->trainable = trainable_trunk;

  if (spec_.custom_head) {
    head_.add(std::make_unique<Dropout>("head.0", 0.2));
    head_.add(std::make_unique<Linear>("head.1", feature_width_, 1000));
    if (spec_.head_activation) head_.add(std::make_unique<nn::ReLU>());
    head_.add(std::make_unique<Dropout>("head.3", 0.2));
    head_.add(std::make_unique<Linear>("head.4", 1000, spec_.num_classes));
  } else {
    head_.add(std::make_unique<Linear>("head", feature_width_,
                                       spec_.num_classes));
  }
}

Tensor Model::forward_features(const Tensor& batch, bool train) {
  if (batch.rank() != 4 || batch.dim(1) != 3) {
    throw_runtime("model forward: expected (N,3,H,W) batch, got " +
                  batch.shape_str());
  }
  if (batch.dim(0) < 1) {
    throw_runtime("model forward: empty batch (N must be >= 1)");
  }
  // Frozen trunks stay in inference mode: batch-norm keeps running
  // statistics and dropout stays inactive.
  return trunk_->forward(batch, trunk_trainable() ? train : false);
}

Tensor Model::forward(const Tensor& batch, bool train) {
  Tensor features = forward_features(batch, train);
  Tensor logits = head_.forward(features, train);
  for (float v : logits.data) {
    if (!std::isfinite(v)) {
      throw_runtime("model forward: non-finite logits");
    }
  }
  return logits;
}

void Model::backward(const Tensor& grad_logits) {
  Tensor grad_features = head_.backward(grad_logits);
  if (trunk_trainable()) {
    trunk_->backward(grad_features);
  }
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> params;
  trunk_->collect_params(params);
  head_.collect_params(params);
  return params;
}

std::vector<Parameter*> Model::trainable_parameters() {
  std::vector<Parameter*> out;
  for (auto* p : parameters()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

std::vector<nn::BufferState*> Model::buffers() {
  std::vector<nn::BufferState*> bufs;
  trunk_->collect_buffers(bufs);
  head_.collect_buffers(bufs);
  return bufs;
}

void Model::reseed(std::uint64_t seed) {
  trunk_->reseed(derive_seed({seed, 1}));
  head_.reseed(derive_seed({seed, 2}));
}

void Model::clear_cache() {
  trunk_->clear_cache();
  head_.clear_cache();
}

void Model::save_checkpoint(const std::filesystem::path& path) const {
  auto* self = const_cast<Model*>(this);
  std::vector<std::pair<std::string, const Tensor*>> named;
  for (auto* p : self->parameters()) named.emplace_back(p->name, &p->value);
  for (auto* b : self->buffers()) named.emplace_back(b->name, &b->value);
  write_tensor_archive(path, spec_.model_id, named);
}

void Model::load_checkpoint(const std::filesystem::path& path) {
  TensorArchive archive = read_tensor_archive(path);
  if (archive.model_id != spec_.model_id) {
    throw_data("checkpoint " + path.string() + " holds model '" +
               archive.model_id + "', expected '" + spec_.model_id + "'");
  }
  auto assign = [&](const std::string& name, Tensor& dst) {
    auto it = archive.tensors.find(name);
    if (it == archive.tensors.end()) {
      throw_data("checkpoint " + path.string() + " is missing tensor '" +
                 name + "'");
    }
    if (it->second.shape != dst.shape) {
      throw_data("checkpoint " + path.string() + ": tensor '" + name +
                 "' has shape " + it->second.shape_str() + ", expected " +
                 dst.shape_str());
    }
    dst = it->second;
  };
  for (auto* p : parameters()) assign(p->name, p->value);
  for (auto* b : buffers()) assign(b->name, b->value);
}

ParamCounts count_parameters(Model& model) {
  ParamCounts counts;
  for (auto* p : model.parameters()) {
    counts.total += p->value.numel();
    if (p->trainable) counts.trainable += p->value.numel();
  }
  return counts;
}

// ----------------------------------------------------------------- init

namespace {

void init_parameter_random(Parameter& p, std::uint64_t seed) {
  Rng rng(derive_seed({seed, fnv1a64(p.name.data(), p.name.size())}));
  const auto& shape = p.value.shape;
  if (shape.size() == 4) {
    // Kaiming normal, fan-out mode.
    double fan_out = static_cast<double>(shape[0]) * shape[2] * shape[3];
    double stddev = std::sqrt(2.0 / fan_out);
    for (auto& v : p.value.data)
      v = static_cast<float>(rng.normal() * stddev);
  } else if (shape.size() == 2) {
    for (auto& v : p.value.data)
      v = static_cast<float>(rng.normal() * 0.01);
  } else {
    // 1-D: batch-norm scales stay 1, every bias stays 0.
    bool is_gamma = p.name.size() >= 7 &&
                    p.name.compare(p.name.size() - 7, 7, ".weight") == 0;
    for (auto& v : p.value.data) v = is_gamma ? 1.0f : 0.0f;
  }
}

void random_init_trunk(Model& model, std::uint64_t seed) {
  for (auto* p : model.parameters()) {
    if (p->name.rfind("head", 0) == 0) continue;  // heads done separately
    init_parameter_random(*p, seed);
  }
}

void load_pretrained_trunk(Model& model, BackboneId id,
                           const std::filesystem::path& weights_dir) {
  const auto path =
      weights_dir / (std::string(backbone_name(id)) + ".mrbw");
  if (!std::filesystem::exists(path)) {
    throw_data("pretrained weights for " + std::string(backbone_name(id)) +
               " not found at " + path.string() +
               "; run tools/export_weights.py to convert the published "
               "checkpoint, or point MRIBENCH_WEIGHTS_DIR at your cache");
  }
  TensorArchive archive = read_tensor_archive(path);
  if (archive.model_id != backbone_name(id)) {
    throw_data("weight archive " + path.string() + " holds '" +
               archive.model_id + "', expected '" + backbone_name(id) + "'");
  }
  auto assign = [&](const std::string& name, Tensor& dst) {
    auto it = archive.tensors.find(name);
    if (it == archive.tensors.end()) {
      throw_data("weight archive " + path.string() + " is missing '" + name +
                 "' (re-export with tools/export_weights.py)");
    }
    if (it->second.shape != dst.shape) {
      throw_data("weight archive " + path.string() + ": '" + name +
                 "' has shape " + it->second.shape_str() + ", expected " +
                 dst.shape_str());
    }
    dst = it->second;
  };
  // The archive also carries the original 1000-way classifier; those
  // tensors are simply not referenced after head replacement.
  for (auto* p : model.parameters()) {
    if (p->name.rfind("head", 0) == 0) continue;
    assign(p->name, p->value);
  }
  for (auto* b : model.buffers()) assign(b->name, b->value);
}

void init_head(Model& model, std::uint64_t seed) {
  for (auto* p : model.parameters()) {
    if (p->name.rfind("head", 0) != 0) continue;
    init_parameter_random(*p, derive_seed({seed, 0x68656164}));
  }
}

}  // namespace

std::unique_ptr<Model> build_custom(ModelSpec spec, InitMode init,
                                    std::uint64_t init_seed,
                                    const std::filesystem::path& weights_dir) {
  auto model =
      std::make_unique<Model>(spec, build_backbone(spec.backbone));
  if (init == InitMode::kPretrained) {
    load_pretrained_trunk(*model, spec.backbone, weights_dir);
  } else {
    random_init_trunk(*model, init_seed);
  }
  init_head(*model, init_seed);
  return model;
}

std::unique_ptr<Model> build_transfer_baseline(
    BackboneId id, int num_classes, InitMode init, std::uint64_t init_seed,
    const std::filesystem::path& weights_dir) {
  ModelSpec spec = spec_for_model_id(backbone_name(id));
  spec.num_classes = num_classes;
  return build_custom(std::move(spec), init, init_seed, weights_dir);
}

std::unique_ptr<Model> build_mobilenet_bt(
    int num_classes, InitMode init, std::uint64_t init_seed,
    const std::filesystem::path& weights_dir) {
  ModelSpec spec = spec_for_model_id("mobilenet_bt");
  spec.num_classes = num_classes;
  return build_custom(std::move(spec), init, init_seed, weights_dir);
}

std::unique_ptr<Model> build_model(const std::string& model_id, InitMode init,
                                   std::uint64_t init_seed,
                                   const std::filesystem::path& weights_dir) {
  ModelSpec spec = spec_for_model_id(model_id);
  return build_custom(std::move(spec), init, init_seed, weights_dir);
}

}  // namespace mribench::zoo
