#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "collasprite/rng.hpp"
#include "collasprite/sprite.hpp"

namespace collasprite {

namespace detail {

// Most frequent corner pixel color; ties resolve in corner order
// (top-left, top-right, bottom-left, bottom-right). Sprite scrapes
// conventionally key the background on a corner color.
inline std::array<uint8_t, 3> detect_background_key(const RawImage& img) {
  std::array<std::pair<int, int>, 4> corners = {{{0, 0},
                                                 {img.width - 1, 0},
                                                 {0, img.height - 1},
                                                 {img.width - 1, img.height - 1}}};
  std::array<std::array<uint8_t, 3>, 4> colors;
  for (size_t i = 0; i < 4; ++i) {
    const uint8_t* p = img.at(corners[i].first, corners[i].second);
    colors[i] = {p[0], p[1], p[2]};
  }
  std::array<int, 4> counts{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j)
      if (colors[i] == colors[j]) ++counts[i];
  size_t best = 0;
  for (size_t i = 1; i < 4; ++i)
    if (counts[i] > counts[best]) best = i;
  return colors[best];
}

}  // namespace detail

// Centers an image of up to 64x64 on a transparent canvas. RGB inputs get an
// alpha channel keyed on the detected background color.
inline Sprite pad_and_alpha(const RawImage& img) {
  require(img.channels == 3 || img.channels == 4,
          "pad_and_alpha: need 3 or 4 channels, got ", img.channels);
  require(img.width >= 1 && img.height >= 1, "pad_and_alpha: empty image");
  require(img.width <= kSpriteSize && img.height <= kSpriteSize,
          "pad_and_alpha: image is ", img.width, "x", img.height,
          ", larger than ", kSpriteSize, " (downscaling is not supported)");

  std::array<uint8_t, 3> key{};
  if (img.channels == 3) key = detail::detect_background_key(img);

  ImageRgba8 canvas = make_rgba(kSpriteSize, kSpriteSize);
  int off_x = (kSpriteSize - img.width) / 2;
  int off_y = (kSpriteSize - img.height) / 2;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const uint8_t* src = img.at(x, y);
      uint8_t* dst = canvas.at(x + off_x, y + off_y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
      if (img.channels == 4) {
        dst[3] = src[3];
      } else {
        bool background = src[0] == key[0] && src[1] == key[1] && src[2] == key[2];
        dst[3] = background ? 0 : 255;
      }
    }
  }
  return Sprite(std::move(canvas));
}

namespace detail {

struct Hsv {
  double h;  // degrees [0, 360)
  double s;
  double v;
};

inline Hsv rgb_to_hsv(uint8_t r8, uint8_t g8, uint8_t b8) {
  double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  double hi = std::max({r, g, b});
  double lo = std::min({r, g, b});
  double c = hi - lo;
  double h = 0.0;
  if (c > 0.0) {
    if (hi == r)
      h = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
    else if (hi == g)
      h = 60.0 * ((b - r) / c + 2.0);
    else
      h = 60.0 * ((r - g) / c + 4.0);
  }
  double s = hi > 0.0 ? c / hi : 0.0;
  return {h, s, hi};
}

inline std::array<uint8_t, 3> hsv_to_rgb(const Hsv& hsv) {
  double c = hsv.v * hsv.s;
  double hp = hsv.h / 60.0;
  double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  double m = hsv.v - c;
  auto q = [&](double v) {
    return static_cast<uint8_t>(std::clamp(std::lround((v + m) * 255.0), 0L, 255L));
  };
  return {q(r), q(g), q(b)};
}

}  // namespace detail

inline ImageRgba8 hue_rotate_image(const ImageRgba8& img, double angle_deg) {
  ImageRgba8 out = img;
  double angle = std::fmod(std::fmod(angle_deg, 360.0) + 360.0, 360.0);
  if (angle == 0.0) return out;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      uint8_t* p = out.at(x, y);
      detail::Hsv hsv = detail::rgb_to_hsv(p[0], p[1], p[2]);
      hsv.h = std::fmod(hsv.h + angle, 360.0);
      auto rgb = detail::hsv_to_rgb(hsv);
      p[0] = rgb[0];
      p[1] = rgb[1];
      p[2] = rgb[2];
      // alpha untouched
    }
  }
  return out;
}

// Identical hue shift on all four poses keeps the sheet paired.
inline CharacterSheet hue_rotate(const CharacterSheet& sheet, double angle_deg) {
  CharacterSheet out = sheet;
  for (DomainId d : all_domains())
    out.pose(d) = Sprite(hue_rotate_image(sheet.pose(d).image(), angle_deg));
  return out;
}

// Seed-deterministic split: |train| = floor(ratio * n). Membership comes from
// a Fisher-Yates shuffle; both halves keep the dataset's original order.
inline std::pair<Dataset, Dataset> split(const Dataset& dataset, double ratio,
                                         uint64_t seed) {
  require(ratio > 0.0 && ratio <= 1.0, "split ratio must be in (0, 1], got ", ratio);
  size_t n = dataset.size();
  size_t n_train = static_cast<size_t>(std::floor(ratio * static_cast<double>(n)));

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (size_t i = n; i > 1; --i) {
    size_t j = rng.uniform_int(i);
    std::swap(order[i - 1], order[j]);
  }

  std::vector<bool> in_train(n, false);
  for (size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  std::vector<CharacterSheet> train, test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (size_t i = 0; i < n; ++i)
    (in_train[i] ? train : test).push_back(dataset.sheet(i));
  return {Dataset(std::move(train), "train"), Dataset(std::move(test), "test")};
}

}  // namespace collasprite
