#include <array>

#include "core/common.hpp"
#include "core/models/blocks.hpp"
#include "core/models/zoo.hpp"

namespace mribench::zoo {

using nn::AdaptiveAvgPool2d;
using nn::BatchNorm2d;
using nn::Conv2d;
using nn::Dropout;
using nn::Flatten;
using nn::Linear;
using nn::MaxPool2d;
using nn::ReLU;
using nn::Sequential;

namespace {

BackboneBundle build_mobilenet_v2() {
  // Inverted-residual schedule: expand t, channels c, repeats n, stride s.
  struct Row {
    int t, c, n, s;
  };
  constexpr std::array<Row, 7> rows = {{{1, 16, 1, 1},
                                        {6, 24, 2, 2},
                                        {6, 32, 3, 2},
                                        {6, 64, 4, 2},
                                        {6, 96, 3, 1},
                                        {6, 160, 3, 2},
                                        {6, 320, 1, 1}}};
  BackboneBundle b;
  b.trunk = std::make_unique<Sequential>();
  b.trunk->add(conv_bn_act("features.0.0", "features.0.1", 3, 32, 3, 2, 1,
                           std::make_unique<nn::ReLU6>()));
  int in_ch = 32;
  int feature_idx = 1;
  for (const auto& row : rows) {
    for (int i = 0; i < row.n; ++i) {
      int stride = i == 0 ? row.s : 1;
      b.trunk->add(std::make_unique<InvertedResidual>(
          "features." + std::to_string(feature_idx) + ".conv", in_ch, row.c,
          stride, row.t));
      in_ch = row.c;
      ++feature_idx;
    }
  }
  b.trunk->add(conv_bn_act("features.18.0", "features.18.1", 320, 1280, 1, 1,
                           1, std::make_unique<nn::ReLU6>()));
  b.trunk->add(std::make_unique<AdaptiveAvgPool2d>(1));
  b.trunk->add(std::make_unique<Flatten>());
  b.final_linear = std::make_unique<Linear>("classifier.1", 1280, 1000);
  b.transfer_width = 1280;
  return b;
}

BackboneBundle build_resnet18() {
  BackboneBundle b;
  b.trunk = std::make_unique<Sequential>();
  b.trunk->add(std::make_unique<Conv2d>("conv1", 3, 64, 7, 2, 3, 1, false));
  b.trunk->add(std::make_unique<BatchNorm2d>("bn1", 64));
  b.trunk->add(std::make_unique<ReLU>());
  b.trunk->add(std::make_unique<MaxPool2d>(3, 2, 1));

  int in_ch = 64;
  const int widths[4] = {64, 128, 256, 512};
  for (int layer = 0; layer < 4; ++layer) {
    int out_ch = widths[layer];
    for (int blk = 0; blk < 2; ++blk) {
      int stride = (blk == 0 && layer > 0) ? 2 : 1;
      b.trunk->add(std::make_unique<BasicBlock>(
          "layer" + std::to_string(layer + 1) + "." + std::to_string(blk),
          in_ch, out_ch, stride));
      in_ch = out_ch;
    }
  }
  b.trunk->add(std::make_unique<AdaptiveAvgPool2d>(1));
  b.trunk->add(std::make_unique<Flatten>());
  b.final_linear = std::make_unique<Linear>("fc", 512, 1000);
  b.transfer_width = 512;
  return b;
}

BackboneBundle build_efficientnet_b0() {
  // MBConv schedule: expand t, channels c, repeats n, stride s, kernel k.
  struct Row {
    int t, c, n, s, k;
  };
  constexpr std::array<Row, 7> rows = {{{1, 16, 1, 1, 3},
                                        {6, 24, 2, 2, 3},
                                        {6, 40, 2, 2, 5},
                                        {6, 80, 3, 2, 3},
                                        {6, 112, 3, 1, 5},
                                        {6, 192, 4, 2, 5},
                                        {6, 320, 1, 1, 3}}};
  BackboneBundle b;
  b.trunk = std::make_unique<Sequential>();
  b.trunk->add(conv_bn_act("features.0.0", "features.0.1", 3, 32, 3, 2, 1,
                           std::make_unique<nn::SiLU>()));
  int in_ch = 32;
  int stage = 1;
  for (const auto& row : rows) {
    for (int i = 0; i < row.n; ++i) {
      int stride = i == 0 ? row.s : 1;
      b.trunk->add(std::make_unique<MBConv>(
          "features." + std::to_string(stage) + "." + std::to_string(i),
          in_ch, row.c, row.k, stride, row.t));
      in_ch = row.c;
    }
    ++stage;
  }
  b.trunk->add(conv_bn_act("features.8.0", "features.8.1", 320, 1280, 1, 1, 1,
                           std::make_unique<nn::SiLU>()));
  b.trunk->add(std::make_unique<AdaptiveAvgPool2d>(1));
  b.trunk->add(std::make_unique<Flatten>());
  b.final_linear = std::make_unique<Linear>("classifier.1", 1280, 1000);
  b.transfer_width = 1280;
  return b;
}

BackboneBundle build_vgg16() {
  BackboneBundle b;
  b.trunk = std::make_unique<Sequential>();
  const int plan[] = {64, 64, -1, 128, 128, -1, 256, 256, 256, -1,
                      512, 512, 512, -1, 512, 512, 512, -1};
  int in_ch = 3;
  int idx = 0;
  for (int entry : plan) {
    if (entry == -1) {
      b.trunk->add(std::make_unique<MaxPool2d>(2, 2));
      ++idx;
    } else {
      b.trunk->add(std::make_unique<Conv2d>(
          "features." + std::to_string(idx), in_ch, entry, 3, 1, 1, 1, true));
      b.trunk->add(std::make_unique<ReLU>());
      in_ch = entry;
      idx += 2;
    }
  }
  b.trunk->add(std::make_unique<AdaptiveAvgPool2d>(7));
  b.trunk->add(std::make_unique<Flatten>());
  // All but the last classifier layer stay in the trunk: only the final
  // linear is replaced for transfer.
  b.trunk->add(std::make_unique<Linear>("classifier.0", 512 * 7 * 7, 4096));
  b.trunk->add(std::make_unique<ReLU>());
  b.trunk->add(std::make_unique<Dropout>("classifier.2", 0.5));
  b.trunk->add(std::make_unique<Linear>("classifier.3", 4096, 4096));
  b.trunk->add(std::make_unique<ReLU>());
  b.trunk->add(std::make_unique<Dropout>("classifier.5", 0.5));
  b.final_linear = std::make_unique<Linear>("classifier.6", 4096, 1000);
  b.transfer_width = 4096;
  return b;
}

}  // namespace

const char* backbone_name(BackboneId id) {
  switch (id) {
    case BackboneId::kMobileNetV2:
      return "mobilenet_v2";
    case BackboneId::kResNet18:
      return "resnet18";
    case BackboneId::kEfficientNetB0:
      return "efficientnet_b0";
    case BackboneId::kVgg16:
      return "vgg16";
  }
  throw_runtime("unknown backbone id");
}

std::int64_t reference_param_count(BackboneId id) {
  switch (id) {
    case BackboneId::kMobileNetV2:
      return 3'500'000;
    case BackboneId::kResNet18:
      return 11'700'000;
    case BackboneId::kEfficientNetB0:
      return 5'300'000;
    case BackboneId::kVgg16:
      return 138'000'000;
  }
  throw_runtime("unknown backbone id");
}

BackboneBundle build_backbone(BackboneId id) {
  BackboneBundle b;
  switch (id) {
    case BackboneId::kMobileNetV2:
      b = build_mobilenet_v2();
      break;
    case BackboneId::kResNet18:
      b = build_resnet18();
      break;
    case BackboneId::kEfficientNetB0:
      b = build_efficientnet_b0();
      break;
    case BackboneId::kVgg16:
      b = build_vgg16();
      break;
  }

  // Sanity: the constructed architecture must land within 2% of the
  // published size.
  std::vector<nn::Parameter*> params;
  b.trunk->collect_params(params);
  b.final_linear->collect_params(params);
  std::int64_t total = 0;
  for (auto* p : params) total += p->value.numel();
  std::int64_t ref = reference_param_count(id);
  double rel =
      std::abs(static_cast<double>(total - ref)) / static_cast<double>(ref);
  if (rel > 0.02) {
    throw_runtime(std::string("backbone ") + backbone_name(id) +
                  " parameter count " + std::to_string(total) +
                  " deviates more than 2% from the reference " +
                  std::to_string(ref));
  }
  return b;
}

}  // namespace mribench::zoo
