#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "collasprite/common.hpp"
#include "collasprite/tensor.hpp"

namespace collasprite {

// 8-bit interleaved raster, 3 (RGB) or 4 (RGBA) channels. This is the I/O
// representation; model code works on normalized tensors.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;

  RawImage() = default;
  RawImage(int w, int h, int c)
      : width(w), height(h), channels(c),
        pixels(static_cast<size_t>(w) * h * c, 0) {}

  uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * channels;
  }
  const uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * channels;
  }

  bool operator==(const RawImage&) const = default;
};

using ImageRgba8 = RawImage;  // channels == 4 by convention

inline ImageRgba8 make_rgba(int w, int h) { return RawImage(w, h, 4); }

// Model pixel range is [-1, 1]: u8 c -> c/127.5 - 1.
template <typename T = float>
Tensor<T> image_to_model(const ImageRgba8& img) {
  require(img.channels == 4, "image_to_model: expected RGBA");
  Tensor<T> t(img.height, img.width, 4);
  const uint8_t* src = img.pixels.data();
  T* dst = t.data();
  for (size_t i = 0; i < t.size(); ++i)
    dst[i] = static_cast<T>(src[i]) / T(127.5) - T(1);
  return t;
}

inline uint8_t to_u8(double v) {
  double scaled = (v + 1.0) * 127.5;
  long r = std::lround(scaled);
  return static_cast<uint8_t>(std::clamp(r, 0L, 255L));
}

template <typename T>
ImageRgba8 model_to_image(const Tensor<T>& t) {
  require(t.rank() == 3 && t.channels() == 4, "model_to_image: expected HxWx4");
  ImageRgba8 img = make_rgba(t.width(), t.height());
  const T* src = t.data();
  uint8_t* dst = img.pixels.data();
  for (size_t i = 0; i < t.size(); ++i) dst[i] = to_u8(static_cast<double>(src[i]));
  return img;
}

inline ImageRgba8 flip_horizontal(const ImageRgba8& img) {
  require(img.channels == 4, "flip: expected RGBA");
  ImageRgba8 out = make_rgba(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const uint8_t* s = img.at(img.width - 1 - x, y);
      std::copy(s, s + 4, out.at(x, y));
    }
  return out;
}

// Alpha-composites over white and drops alpha; output in [0, 1] per channel.
// Fixed convention for feature extraction, where a background must be chosen.
inline std::vector<double> composite_over_white(const ImageRgba8& img) {
  require(img.channels == 4, "composite: expected RGBA");
  std::vector<double> rgb(static_cast<size_t>(img.width) * img.height * 3);
  const uint8_t* src = img.pixels.data();
  for (size_t i = 0, n = rgb.size() / 3; i < n; ++i) {
    double a = src[i * 4 + 3] / 255.0;
    for (int c = 0; c < 3; ++c)
      rgb[i * 3 + c] = (src[i * 4 + c] / 255.0) * a + (1.0 - a);
  }
  return rgb;
}

}  // namespace collasprite
