#pragma once

#include <array>

#include "core/image.hpp"
#include "core/nn/tensor.hpp"
#include "core/rng.hpp"

namespace mribench::aug {

enum class FlipAxis { kHorizontal, kVertical };

struct PreprocessConfig {
  double flip_prob = 0.5;
  double rotation_degrees = 10.0;
  int target_size = 224;
  // Channel statistics of the large-scale pretraining corpus; all five
  // backbones were pretrained with these, so they are the default.
  std::array<double, 3> mean = {0.485, 0.456, 0.406};
  std::array<double, 3> std = {0.229, 0.224, 0.225};

  void validate() const;
};

// Mirrors along the axis with probability p. One uniform draw is consumed on
// every call regardless of outcome, keeping streams aligned.
ImagePixels random_flip(const ImagePixels& img, FlipAxis axis, double p,
                        Rng& rng);

ImagePixels flip(const ImagePixels& img, FlipAxis axis);

// Rotates by an angle drawn uniformly from [-degrees, +degrees] about the
// image center. Canvas size is preserved, exposed corners are black,
// resampling is bilinear. degrees == 0 reproduces the input exactly.
ImagePixels random_rotation(const ImagePixels& img, double degrees, Rng& rng);

ImagePixels rotate(const ImagePixels& img, double angle_degrees);

// Bilinear resize to size x size. Aspect ratio is not preserved; the source
// corpus is square so no crop stage exists.
ImagePixels resize(const ImagePixels& img, int size);

// uint8 [0,255] -> float CHW in [0,1].
nn::Tensor to_unit_range(const ImagePixels& img);

// Per-channel (x - mean) / std.
void normalize(nn::Tensor& chw, const std::array<double, 3>& mean,
               const std::array<double, 3>& std);

// Train pipeline: horizontal flip -> vertical flip -> rotation -> resize ->
// unit range -> normalize. Consumes exactly three draws from rng.
struct TrainPipeline {
  PreprocessConfig cfg;
  nn::Tensor operator()(const ImagePixels& img, Rng& rng) const;
};

// Eval pipeline: resize -> unit range -> normalize. Pure function of the
// input bytes.
struct EvalPipeline {
  PreprocessConfig cfg;
  nn::Tensor operator()(const ImagePixels& img) const;
};

TrainPipeline build_train_pipeline(const PreprocessConfig& cfg);
EvalPipeline build_eval_pipeline(const PreprocessConfig& cfg);

}  // namespace mribench::aug
