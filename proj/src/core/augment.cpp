#include "core/augment.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mribench::aug {

void PreprocessConfig::validate() const {
  if (flip_prob < 0.0 || flip_prob > 1.0)
    throw_config("aug.flip_prob must be in [0, 1]");
  if (rotation_degrees < 0.0)
    throw_config("aug.rotation_degrees must be >= 0");
  if (target_size <= 0) throw_config("aug.target_size must be > 0");
  for (double s : std) {
    if (s <= 0.0) throw_config("aug.std components must be > 0");
  }
}

ImagePixels flip(const ImagePixels& img, FlipAxis axis) {
  ImagePixels out = make_image(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      int sy = axis == FlipAxis::kVertical ? img.height - 1 - y : y;
      int sx = axis == FlipAxis::kHorizontal ? img.width - 1 - x : x;
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

ImagePixels random_flip(const ImagePixels& img, FlipAxis axis, double p,
                        Rng& rng) {
  if (p < 0.0 || p > 1.0) throw_config("flip probability must be in [0, 1]");
  double draw = rng.uniform();
  if (draw < p) return flip(img, axis);
  return img;
}

namespace {

// Bilinear sample at (sx, sy); caller guarantees both lie in
// [0, w-1] x [0, h-1].
double sample_bilinear(const ImagePixels& img, double sx, double sy, int c) {
  int x0 = static_cast<int>(std::floor(sx));
  int y0 = static_cast<int>(std::floor(sy));
  double fx = sx - x0;
  double fy = sy - y0;
  int x1 = fx > 0.0 ? x0 + 1 : x0;
  int y1 = fy > 0.0 ? y0 + 1 : y0;

  double v00 = img.at(y0, x0, c);
  double v01 = img.at(y0, x1, c);
  double v10 = img.at(y1, x0, c);
  double v11 = img.at(y1, x1, c);
  double top = v00 * (1.0 - fx) + v01 * fx;
  double bottom = v10 * (1.0 - fx) + v11 * fx;
  return top * (1.0 - fy) + bottom * fy;
}

std::uint8_t to_u8(double v) {
  long r = std::lround(v);
  if (r < 0) r = 0;
  if (r > 255) r = 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace

ImagePixels rotate(const ImagePixels& img, double angle_degrees) {
  const double rad = angle_degrees * 3.14159265358979323846 / 180.0;
  const double cosr = std::cos(rad);
  const double sinr = std::sin(rad);
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;

  ImagePixels out = make_image(img.width, img.height, 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      // Inverse mapping: rotate the destination coordinate back by -angle.
      double dx = x - cx;
      double dy = y - cy;
      double sx = cosr * dx + sinr * dy + cx;
      double sy = -sinr * dx + cosr * dy + cy;
      if (sx < 0.0 || sx > img.width - 1 || sy < 0.0 || sy > img.height - 1)
        continue;  // exposed corner stays black
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = to_u8(sample_bilinear(img, sx, sy, c));
      }
    }
  }
  return out;
}

ImagePixels random_rotation(const ImagePixels& img, double degrees, Rng& rng) {
  if (degrees < 0.0) throw_config("rotation range must be >= 0");
  double angle = rng.uniform(-degrees, degrees);
  return rotate(img, angle);
}

ImagePixels resize(const ImagePixels& img, int size) {
  if (img.empty()) throw_data("resize: empty image");
  if (size <= 0) throw_config("resize: target size must be > 0");
  if (img.width == size && img.height == size) return img;

  ImagePixels out = make_image(size, size);
  const double sx_scale = static_cast<double>(img.width) / size;
  const double sy_scale = static_cast<double>(img.height) / size;
  for (int y = 0; y < size; ++y) {
    // Half-pixel center convention, clamped to the valid span.
    double sy = (y + 0.5) * sy_scale - 0.5;
    if (sy < 0.0) sy = 0.0;
    if (sy > img.height - 1) sy = img.height - 1;
    for (int x = 0; x < size; ++x) {
      double sx = (x + 0.5) * sx_scale - 0.5;
      if (sx < 0.0) sx = 0.0;
      if (sx > img.width - 1) sx = img.width - 1;
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = to_u8(sample_bilinear(img, sx, sy, c));
      }
    }
  }
  return out;
}

nn::Tensor to_unit_range(const ImagePixels& img) {
  nn::Tensor t({3, img.height, img.width});
  std::size_t i = 0;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        t.data[i++] = static_cast<float>(img.at(y, x, c)) / 255.0f;
      }
    }
  }
  return t;
}

void normalize(nn::Tensor& chw, const std::array<double, 3>& mean,
               const std::array<double, 3>& std) {
  for (double s : std) {
    if (s <= 0.0) throw_config("normalize: std components must be > 0");
  }
  if (chw.rank() != 3 || chw.dim(0) != 3)
    throw_runtime("normalize: expected (3,H,W) tensor, got " +
                  chw.shape_str());
  const std::int64_t plane =
      static_cast<std::int64_t>(chw.dim(1)) * chw.dim(2);
  for (int c = 0; c < 3; ++c) {
    const float m = static_cast<float>(mean[static_cast<std::size_t>(c)]);
    const float s = static_cast<float>(std[static_cast<std::size_t>(c)]);
    float* p = chw.data.data() + c * plane;
    for (std::int64_t i = 0; i < plane; ++i) p[i] = (p[i] - m) / s;
  }
}

nn::Tensor TrainPipeline::operator()(const ImagePixels& img, Rng& rng) const {
  ImagePixels work = random_flip(img, FlipAxis::kHorizontal, cfg.flip_prob,
                                 rng);
  work = random_flip(work, FlipAxis::kVertical, cfg.flip_prob, rng);
  work = random_rotation(work, cfg.rotation_degrees, rng);
  work = resize(work, cfg.target_size);
  nn::Tensor t = to_unit_range(work);
  normalize(t, cfg.mean, cfg.std);
  return t;
}

nn::Tensor EvalPipeline::operator()(const ImagePixels& img) const {
  ImagePixels work = resize(img, cfg.target_size);
  nn::Tensor t = to_unit_range(work);
  normalize(t, cfg.mean, cfg.std);
  return t;
}

TrainPipeline build_train_pipeline(const PreprocessConfig& cfg) {
  cfg.validate();
  return TrainPipeline{cfg};
}

EvalPipeline build_eval_pipeline(const PreprocessConfig& cfg) {
  cfg.validate();
  return EvalPipeline{cfg};
}

}  // namespace mribench::aug
