#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <string>

#include "collasprite/rng.hpp"
#include "collasprite/sprite.hpp"
#include "collasprite/sprite_ops.hpp"

namespace collasprite {

// Knobs for the procedural character generator. Defaults give enough shape
// and palette variety for desk-scale experiments while staying learnable.
struct SynthStyle {
  int head_w_min = 12, head_w_max = 20;
  int head_h_min = 10, head_h_max = 16;
  int torso_w_min = 10, torso_w_max = 18;
  int torso_h_min = 12, torso_h_max = 18;
  int leg_h_min = 8, leg_h_max = 14;
  int hair_h_min = 2, hair_h_max = 5;
  double sat_min = 0.45, sat_max = 0.9;
  double val_min = 0.5, val_max = 0.9;
};

namespace detail {

struct SynthParams {
  int head_w, head_h, torso_w, torso_h, leg_h, leg_w, arm_w, hair_h;
  int eye_dx, eye_dy;  // eye offset inside the head
  std::array<uint8_t, 4> skin, hair, shirt, pants, outline, eye;
};

inline std::array<uint8_t, 4> pick_color(Rng& rng, double s_lo, double s_hi,
                                         double v_lo, double v_hi) {
  Hsv hsv{rng.uniform(0.0, 360.0), rng.uniform(s_lo, s_hi), rng.uniform(v_lo, v_hi)};
  auto rgb = hsv_to_rgb(hsv);
  return {rgb[0], rgb[1], rgb[2], 255};
}

inline int lo_hi(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(hi - lo + 1)));
}

inline int pick_even(Rng& rng, int lo, int hi) {
  int v = lo_hi(rng, lo, hi);
  return v - (v - lo) % 2;
}

inline SynthParams draw_params(Rng& rng, const SynthStyle& st) {
  SynthParams p{};
  p.head_w = pick_even(rng, st.head_w_min, st.head_w_max);
  p.head_h = lo_hi(rng, st.head_h_min, st.head_h_max);
  p.torso_w = pick_even(rng, st.torso_w_min, st.torso_w_max);
  p.torso_h = lo_hi(rng, st.torso_h_min, st.torso_h_max);
  p.leg_h = lo_hi(rng, st.leg_h_min, st.leg_h_max);
  p.leg_w = 3 + static_cast<int>(rng.uniform_int(3));
  p.arm_w = 2 + static_cast<int>(rng.uniform_int(3));
  p.hair_h = lo_hi(rng, st.hair_h_min, st.hair_h_max);
  p.eye_dx = 2 + static_cast<int>(rng.uniform_int(2));
  p.eye_dy = p.hair_h + 2 + static_cast<int>(rng.uniform_int(3));
  p.skin = pick_color(rng, 0.25, 0.55, 0.7, 0.95);
  p.hair = pick_color(rng, st.sat_min, st.sat_max, 0.25, st.val_max);
  p.shirt = pick_color(rng, st.sat_min, st.sat_max, st.val_min, st.val_max);
  p.pants = pick_color(rng, st.sat_min, st.sat_max, st.val_min, st.val_max);
  p.outline = {30, 26, 34, 255};
  p.eye = {18, 18, 42, 255};
  return p;
}

inline void fill_rect(ImageRgba8& img, int x0, int y0, int w, int h,
                      const std::array<uint8_t, 4>& color) {
  int x1 = std::min(x0 + w, img.width);
  int y1 = std::min(y0 + h, img.height);
  for (int y = std::max(y0, 0); y < y1; ++y)
    for (int x = std::max(x0, 0); x < x1; ++x)
      std::copy(color.begin(), color.end(), img.at(x, y));
}

inline void outline_rect(ImageRgba8& img, int x0, int y0, int w, int h,
                         const std::array<uint8_t, 4>& color) {
  fill_rect(img, x0, y0, w, 1, color);
  fill_rect(img, x0, y0 + h - 1, w, 1, color);
  fill_rect(img, x0, y0, 1, h, color);
  fill_rect(img, x0 + w - 1, y0, 1, h, color);
}

// Front and back share a silhouette; back hides the face under hair.
inline ImageRgba8 render_facing(const SynthParams& p, bool is_back) {
  ImageRgba8 img = make_rgba(kSpriteSize, kSpriteSize);
  int total_h = p.head_h + p.torso_h + p.leg_h;
  int y0 = (kSpriteSize - total_h) / 2;
  int cx = kSpriteSize / 2;

  int head_x = cx - p.head_w / 2;
  fill_rect(img, head_x, y0, p.head_w, p.head_h, p.skin);
  int hair_h = is_back ? p.head_h - 2 : p.hair_h;
  fill_rect(img, head_x, y0, p.head_w, hair_h, p.hair);
  outline_rect(img, head_x, y0, p.head_w, p.head_h, p.outline);
  if (!is_back) {
    fill_rect(img, cx - p.eye_dx - 1, y0 + p.eye_dy, 2, 2, p.eye);
    fill_rect(img, cx + p.eye_dx - 1, y0 + p.eye_dy, 2, 2, p.eye);
  }

  int torso_y = y0 + p.head_h;
  int torso_x = cx - p.torso_w / 2;
  fill_rect(img, torso_x, torso_y, p.torso_w, p.torso_h, p.shirt);
  outline_rect(img, torso_x, torso_y, p.torso_w, p.torso_h, p.outline);
  fill_rect(img, torso_x - p.arm_w, torso_y + 1, p.arm_w, p.torso_h - 2, p.skin);
  fill_rect(img, torso_x + p.torso_w, torso_y + 1, p.arm_w, p.torso_h - 2, p.skin);

  int leg_y = torso_y + p.torso_h;
  int gap = std::max(1, p.torso_w / 5);
  fill_rect(img, cx - gap / 2 - p.leg_w, leg_y, p.leg_w, p.leg_h, p.pants);
  fill_rect(img, cx + (gap + 1) / 2, leg_y, p.leg_w, p.leg_h, p.pants);
  fill_rect(img, cx - gap / 2 - p.leg_w, leg_y + p.leg_h - 1, p.leg_w, 1, p.outline);
  fill_rect(img, cx + (gap + 1) / 2, leg_y + p.leg_h - 1, p.leg_w, 1, p.outline);
  return img;
}

// Profile facing right; the left pose is its exact mirror.
inline ImageRgba8 render_right(const SynthParams& p) {
  ImageRgba8 img = make_rgba(kSpriteSize, kSpriteSize);
  int total_h = p.head_h + p.torso_h + p.leg_h;
  int y0 = (kSpriteSize - total_h) / 2;
  int cx = kSpriteSize / 2;

  int head_w = std::max(6, (p.head_w * 3) / 4);
  head_w -= head_w % 2;
  int head_x = cx - head_w / 2;
  fill_rect(img, head_x, y0, head_w, p.head_h, p.skin);
  fill_rect(img, head_x, y0, head_w, p.hair_h, p.hair);
  // hair wraps the back of the head (screen-left when facing right)
  fill_rect(img, head_x, y0, std::max(2, head_w / 3), p.head_h - 2, p.hair);
  outline_rect(img, head_x, y0, head_w, p.head_h, p.outline);
  fill_rect(img, head_x + head_w - p.eye_dx - 2, y0 + p.eye_dy, 2, 2, p.eye);

  int torso_w = std::max(6, (p.torso_w * 3) / 4);
  torso_w -= torso_w % 2;
  int torso_y = y0 + p.head_h;
  int torso_x = cx - torso_w / 2;
  fill_rect(img, torso_x, torso_y, torso_w, p.torso_h, p.shirt);
  outline_rect(img, torso_x, torso_y, torso_w, p.torso_h, p.outline);
  // single visible arm down the torso middle
  fill_rect(img, cx - p.arm_w / 2, torso_y + 2, p.arm_w, p.torso_h - 3, p.skin);

  int leg_y = torso_y + p.torso_h;
  fill_rect(img, cx - p.leg_w - 1, leg_y, p.leg_w, p.leg_h - 1, p.pants);
  fill_rect(img, cx + 1, leg_y, p.leg_w, p.leg_h, p.pants);
  fill_rect(img, cx - p.leg_w - 1, leg_y + p.leg_h - 2, p.leg_w, 1, p.outline);
  fill_rect(img, cx + 1, leg_y + p.leg_h - 1, p.leg_w + 1, 1, p.outline);
  return img;
}

}  // namespace detail

inline CharacterSheet synth_sheet(uint64_t seed, size_t index, const SynthStyle& style) {
  Rng rng(mix_seed(seed, index));
  detail::SynthParams p = detail::draw_params(rng, style);

  CharacterSheet sheet;
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth-%05zu", index);
  sheet.id = buf;
  ImageRgba8 right = detail::render_right(p);
  sheet.pose(DomainId::front) = Sprite(detail::render_facing(p, false));
  sheet.pose(DomainId::back) = Sprite(detail::render_facing(p, true));
  sheet.pose(DomainId::right) = Sprite(right);
  sheet.pose(DomainId::left) = Sprite(flip_horizontal(right));
  return sheet;
}

// Procedural paired dataset. All four poses derive from one parameter vector,
// and left/right are exact mirrors, so cross-pose imputation is learnable at
// desk scale.
inline Dataset synth_dataset(size_t n, uint64_t seed, const SynthStyle& style = {}) {
  std::vector<CharacterSheet> sheets;
  sheets.reserve(n);
  for (size_t i = 0; i < n; ++i) sheets.push_back(synth_sheet(seed, i, style));
  return Dataset(std::move(sheets), "train");
}

}  // namespace collasprite
