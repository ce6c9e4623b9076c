#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "core/nn/layers.hpp"
#include "core/nn/module.hpp"

namespace mribench::zoo {

enum class BackboneId { kMobileNetV2, kResNet18, kEfficientNetB0, kVgg16 };

enum class FreezePolicy { kFreezeAllButFinal, kUnfreezeAll };

enum class InitMode { kPretrained, kRandom };

struct ModelSpec {
  std::string model_id;  // mobilenet_v2 | resnet18 | efficientnet_b0 | vgg16
                         // | mobilenet_bt
  BackboneId backbone = BackboneId::kMobileNetV2;
  FreezePolicy freeze = FreezePolicy::kFreezeAllButFinal;
  bool custom_head = false;       // dropout/linear(1000)/../dropout/linear(4)
  bool head_activation = true;    // rectifier between the two head linears;
                                  // without it they compose to one linear map
  int num_classes = 4;
};

const std::vector<std::string>& known_model_ids();
ModelSpec spec_for_model_id(const std::string& model_id);

const char* backbone_name(BackboneId id);
// Reference total parameter counts, in parameters (not millions).
std::int64_t reference_param_count(BackboneId id);

// Full original architecture: trunk maps images to the flattened feature
// vector feeding the final classifier linear, which is kept separate so
// transfer construction can replace it.
struct BackboneBundle {
  std::unique_ptr<nn::Sequential> trunk;
  std::unique_ptr<nn::Linear> final_linear;  // original 1000-way layer
  int transfer_width = 0;                    // input width of final_linear
};

BackboneBundle build_backbone(BackboneId id);

struct ParamCounts {
  std::int64_t total = 0;
  std::int64_t trainable = 0;
};

// The assembled classifier: frozen-or-trainable trunk plus the task head.
class Model {
 public:
  Model(ModelSpec spec, BackboneBundle bundle);

  // Images (N,3,H,W) -> logits (N,num_classes). N must be >= 1; an empty
  // batch is a contract violation. A frozen trunk always runs in inference
  // mode regardless of `train`.
  nn::Tensor forward(const nn::Tensor& batch, bool train);

  // Trunk output only: the (N, feature_width) vector feeding the head.
  nn::Tensor forward_features(const nn::Tensor& batch, bool train);

  // Propagates loss gradients through the head, and through the trunk only
  // when the freeze policy unfreezes it.
  void backward(const nn::Tensor& grad_logits);

  std::vector<nn::Parameter*> parameters();
  std::vector<nn::Parameter*> trainable_parameters();
  std::vector<nn::BufferState*> buffers();

  void reseed(std::uint64_t seed);
  void clear_cache();

  const ModelSpec& spec() const { return spec_; }
  int feature_width() const { return feature_width_; }
  bool trunk_trainable() const {
    return spec_.freeze == FreezePolicy::kUnfreezeAll;
  }

  void save_checkpoint(const std::filesystem::path& path) const;
  void load_checkpoint(const std::filesystem::path& path);

 private:
  ModelSpec spec_;
  std::unique_ptr<nn::Sequential> trunk_;
  nn::Sequential head_;
  int feature_width_ = 0;
};

ParamCounts count_parameters(Model& model);

// Frozen-backbone transfer baseline: pretrained (or seeded random) trunk,
// single trainable linear head.
std::unique_ptr<Model> build_transfer_baseline(
    BackboneId id, int num_classes, InitMode init, std::uint64_t init_seed,
    const std::filesystem::path& weights_dir);

// MobileNet-BT: MobileNetV2 with every layer unfrozen and the
// dropout(0.2)/linear(1000)/relu/dropout(0.2)/linear(4) head.
std::unique_ptr<Model> build_mobilenet_bt(
    int num_classes, InitMode init, std::uint64_t init_seed,
    const std::filesystem::path& weights_dir);

// Dispatch on model_id. Unknown ids are a configuration error listing the
// valid names.
std::unique_ptr<Model> build_model(const std::string& model_id, InitMode init,
                                   std::uint64_t init_seed,
                                   const std::filesystem::path& weights_dir);

// Generic assembler behind the named builders, for explicit spec variants
// (e.g. the custom head over a frozen trunk).
std::unique_ptr<Model> build_custom(ModelSpec spec, InitMode init,
                                    std::uint64_t init_seed,
                                    const std::filesystem::path& weights_dir);

// Default pretrained-weight cache, overridable via MRIBENCH_WEIGHTS_DIR.
std::filesystem::path default_weights_dir();

}  // namespace mribench::zoo
