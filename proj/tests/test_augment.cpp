#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "core/augment.hpp"
#include "core/common.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "support/fixtures.hpp"

using namespace mribench;
using namespace mribench::aug;

namespace {

ImagePixels gradient_image(int w, int h) {
  ImagePixels img = make_image(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(y, x, c) =
            static_cast<std::uint8_t>((x * 7 + y * 13 + c * 31) % 256);
  return img;
}

}  // namespace

TEST_CASE("random_flip") {
  auto img = gradient_image(12, 9);

  SUBCASE("p=0 is always identity") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
      auto out = random_flip(img, FlipAxis::kHorizontal, 0.0, rng);
      CHECK(out.data == img.data);
    }
  }

  SUBCASE("p=1 twice along the same axis is the identity") {
    for (auto axis : {FlipAxis::kHorizontal, FlipAxis::kVertical}) {
      Rng rng(2);
      auto once = random_flip(img, axis, 1.0, rng);
      auto twice = random_flip(once, axis, 1.0, rng);
      CHECK(once.data != img.data);
      CHECK(twice.data == img.data);  // bit-exact involution
    }
  }

  SUBCASE("horizontal flip mirrors columns") {
    auto out = flip(img, FlipAxis::kHorizontal);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        CHECK(out.at(y, x, 0) == img.at(y, img.width - 1 - x, 0));
  }

  SUBCASE("10000 draws at p=0.5 land within the binomial band") {
    for (std::uint64_t axis_seed : {11ull, 22ull}) {
      Rng rng(derive_seed({4242, axis_seed}));
      int flips = 0;
      ImagePixels tiny = gradient_image(2, 2);
      for (int i = 0; i < 10000; ++i) {
        auto out = random_flip(tiny, FlipAxis::kHorizontal, 0.5, rng);
        if (out.data != tiny.data) ++flips;
      }
      double freq = flips / 10000.0;
      CHECK(freq >= 0.48);
      CHECK(freq <= 0.52);
    }
  }
}

TEST_CASE("random_rotation") {
  SUBCASE("degrees=0 is the exact identity") {
    auto img = gradient_image(33, 47);
    Rng rng(3);
    auto out = random_rotation(img, 0.0, rng);
    CHECK(out.data == img.data);
  }

  SUBCASE("fixed seed gives identical bytes across two runs") {
    auto img = gradient_image(64, 64);
    Rng a(777), b(777);
    auto out_a = random_rotation(img, 10.0, a);
    auto out_b = random_rotation(img, 10.0, b);
    CHECK(out_a.data == out_b.data);
  }

  SUBCASE("white 224x224 input keeps a white 100x100 center crop") {
    ImagePixels white = make_image(224, 224, 255);
    for (double angle : {-10.0, -7.3, -1.0, 0.5, 3.9, 10.0}) {
      auto out = rotate(white, angle);
      for (int y = 62; y < 162; ++y) {
        for (int x = 62; x < 162; ++x) {
          if (out.at(y, x, 0) != 255) {
            CAPTURE(angle);
            CAPTURE(x);
            CAPTURE(y);
            REQUIRE(out.at(y, x, 0) == 255);
          }
        }
      }
    }
  }

  SUBCASE("exposed corners are black at a visible angle") {
    ImagePixels white = make_image(64, 64, 255);
    auto out = rotate(white, 10.0);
    CHECK(out.at(0, 0, 0) == 0);
    CHECK(out.at(0, 63, 0) == 0);
  }
}

TEST_CASE("resize") {
  SUBCASE("same-size input is unchanged") {
    auto img = gradient_image(224, 224);
    auto out = resize(img, 224);
    CHECK(out.data == img.data);
  }

  SUBCASE("512 -> 224") {
    auto img = gradient_image(512, 512);
    auto out = resize(img, 224);
    CHECK(out.width == 224);
    CHECK(out.height == 224);
  }

  SUBCASE("constant field stays constant under interpolation") {
    ImagePixels img = make_image(100, 100, 173);
    auto out = resize(img, 224);
    for (int y : {0, 100, 223})
      for (int x : {0, 57, 223}) CHECK(out.at(y, x, 1) == 173);
  }

  SUBCASE("empty input rejected") {
    CHECK_THROWS_AS(resize(ImagePixels{}, 224), Error);
  }
}

TEST_CASE("to_unit_range") {
  ImagePixels img = make_image(4, 4, 0);
  auto zeros = to_unit_range(img);
  for (float v : zeros.data) CHECK(v == 0.0f);

  img = make_image(4, 4, 255);
  auto ones = to_unit_range(img);
  for (float v : ones.data) CHECK(v == 1.0f);

  img = make_image(4, 4, 128);
  auto mid = to_unit_range(img);
  for (float v : mid.data)
    CHECK(v == doctest::Approx(0.501960784).epsilon(1e-6));

  CHECK(mid.shape == std::vector<int>{3, 4, 4});
}

TEST_CASE("normalize") {
  SUBCASE("zero mean unit std is the identity") {
    auto t = to_unit_range(gradient_image(8, 8));
    auto copy = t;
    normalize(t, {0, 0, 0}, {1, 1, 1});
    CHECK(t.data == copy.data);
  }

  SUBCASE("x == mean maps to zero") {
    ImagePixels img = make_image(4, 4, 255);
    auto t = to_unit_range(img);  // all 1.0
    normalize(t, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5});
    for (float v : t.data) CHECK(v == 0.0f);
  }

  SUBCASE("channel-0 arithmetic spot check") {
    ImagePixels img = make_image(2, 2, 0);
    auto t = to_unit_range(img);
    for (auto& v : t.data) v = 0.5f;
    normalize(t, {0.485, 0.456, 0.406}, {0.229, 0.224, 0.225});
    CHECK(t.data[0] == doctest::Approx((0.5 - 0.485) / 0.229).epsilon(1e-5));
  }

  SUBCASE("zero std rejected") {
    auto t = to_unit_range(make_image(2, 2));
    CHECK_THROWS_AS(normalize(t, {0, 0, 0}, {1, 0, 1}), Error);
  }
}

TEST_CASE("pipelines") {
  PreprocessConfig cfg;

  SUBCASE("output shape is 3x224x224 for odd input sizes") {
    auto train = build_train_pipeline(cfg);
    auto eval = build_eval_pipeline(cfg);
    const int sizes[][2] = {{31, 57},  {64, 64},   {100, 300}, {224, 224},
                            {225, 17}, {512, 512}, {640, 480}, {19, 19},
                            {301, 33}, {77, 203}};
    int i = 0;
    for (auto [w, h] : sizes) {
      auto img = gradient_image(w, h);
      Rng rng(derive_seed({9, static_cast<std::uint64_t>(i++)}));
      auto t_train = train(img, rng);
      auto t_eval = eval(img);
      CHECK(t_train.shape == std::vector<int>{3, 224, 224});
      CHECK(t_eval.shape == std::vector<int>{3, 224, 224});
    }
  }

  SUBCASE("eval pipeline is deterministic") {
    auto eval = build_eval_pipeline(cfg);
    auto img = gradient_image(300, 300);
    auto a = eval(img);
    auto b = eval(img);
    CHECK(a.data == b.data);
  }

  SUBCASE("train pipeline with the same seed reproduces bytes") {
    auto train = build_train_pipeline(cfg);
    auto img = gradient_image(256, 256);
    Rng a(31337), b(31337);
    CHECK(train(img, a).data == train(img, b).data);
  }

  SUBCASE("train pipeline with different seeds diverges") {
    auto train = build_train_pipeline(cfg);
    auto img = gradient_image(256, 256);
    Rng a(1), b(2);
    CHECK(train(img, a).data != train(img, b).data);
  }

  SUBCASE("range invariant after unit range and normalize") {
    auto train = build_train_pipeline(cfg);
    auto img = gradient_image(123, 239);
    Rng rng(5);
    auto t = train(img, rng);
    for (int c = 0; c < 3; ++c) {
      float lo = static_cast<float>((0.0 - cfg.mean[c]) / cfg.std[c]);
      float hi = static_cast<float>((1.0 - cfg.mean[c]) / cfg.std[c]);
      const std::int64_t plane = 224 * 224;
      for (std::int64_t i = 0; i < plane; ++i) {
        float v = t.data[static_cast<std::size_t>(c * plane + i)];
        CHECK(v >= lo - 1e-5f);
        CHECK(v <= hi + 1e-5f);
      }
    }
  }

  SUBCASE("invalid config rejected") {
    PreprocessConfig bad = cfg;
    bad.flip_prob = 1.5;
    CHECK_THROWS_AS(build_train_pipeline(bad), Error);
    bad = cfg;
    bad.std[1] = 0.0;
    CHECK_THROWS_AS(build_eval_pipeline(bad), Error);
  }
}

TEST_CASE("per-sample rng stream isolation") {
  // Streams derived from (seed, epoch, index) never share state: augmenting
  // sample j after sample i yields the same bytes as augmenting j alone.
  PreprocessConfig cfg;
  auto train = build_train_pipeline(cfg);
  auto img_a = gradient_image(64, 64);
  auto img_b = gradient_image(96, 96);

  Rng rng_a(derive_seed({100, 0, 0}));
  Rng rng_b(derive_seed({100, 0, 1}));
  auto a_then = train(img_a, rng_a);
  auto b_then = train(img_b, rng_b);

  Rng rng_b_fresh(derive_seed({100, 0, 1}));
  auto b_alone = train(img_b, rng_b_fresh);
  CHECK(b_then.data == b_alone.data);
  CHECK(a_then.data != b_then.data);
}
