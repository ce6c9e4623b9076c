#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mribench {

// 8-bit interleaved RGB, row-major. Every image in the pipeline is 3-channel;
// grayscale sources are replicated and alpha is dropped at load time.
struct ImagePixels {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // height * width * 3

  std::uint8_t at(int y, int x, int c) const {
    return data[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }
  std::uint8_t& at(int y, int x, int c) {
    return data[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }
  bool empty() const { return data.empty(); }
};

ImagePixels make_image(int width, int height, std::uint8_t fill = 0);

// Decodes jpg/jpeg/png from disk. 1 channel is replicated to 3, a 4th (alpha)
// channel is dropped, 16-bit depth is scaled down to 8-bit.
ImagePixels load_image(const std::string& path);

}  // namespace mribench
