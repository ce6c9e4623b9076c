#include "core/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "core/common.hpp"

namespace mribench {

ImagePixels make_image(int width, int height, std::uint8_t fill) {
  ImagePixels img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) *
                      static_cast<std::size_t>(height) * 3,
                  fill);
  return img;
}

ImagePixels load_image(const std::string& path) {
  cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (raw.empty()) {
    throw_data("failed to decode image: " + path);
  }
  if (raw.depth() == CV_16U) {
    cv::Mat down;
    raw.convertTo(down, CV_MAKETYPE(CV_8U, raw.channels()), 1.0 / 257.0);
    raw = down;
  } else if (raw.depth() != CV_8U) {
    throw_data("unsupported image depth in " + path);
  }

  ImagePixels img;
  img.width = raw.cols;
  img.height = raw.rows;
  img.data.resize(static_cast<std::size_t>(raw.cols) *
                  static_cast<std::size_t>(raw.rows) * 3);

  const int ch = raw.channels();
  for (int y = 0; y < raw.rows; ++y) {
    const std::uint8_t* row = raw.ptr<std::uint8_t>(y);
    for (int x = 0; x < raw.cols; ++x) {
      std::uint8_t r, g, b;
      if (ch == 1) {
        r = g = b = row[x];
      } else if (ch == 3 || ch == 4) {
        // OpenCV decodes BGR(A).
        b = row[x * ch + 0];
        g = row[x * ch + 1];
        r = row[x * ch + 2];
      } else {
        throw_data("unsupported channel count (" + std::to_string(ch) +
                   ") in " + path);
      }
      img.at(y, x, 0) = r;
      img.at(y, x, 1) = g;
      img.at(y, x, 2) = b;
    }
  }
  return img;
}

}  // namespace mribench
