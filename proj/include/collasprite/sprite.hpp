#pragma once

#include <array>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "collasprite/common.hpp"
#include "collasprite/domain.hpp"
#include "collasprite/image.hpp"

namespace collasprite {

// 64x64 RGBA raster, validated on construction.
class Sprite {
 public:
  Sprite() : image_(make_rgba(kSpriteSize, kSpriteSize)) {}

  explicit Sprite(ImageRgba8 image) : image_(std::move(image)) {
    require(image_.width == kSpriteSize && image_.height == kSpriteSize,
            "sprite must be ", kSpriteSize, "x", kSpriteSize, ", got ",
            image_.width, "x", image_.height);
    require(image_.channels == kSpriteChannels, "sprite must be RGBA");
  }

  const ImageRgba8& image() const { return image_; }
  ImageRgba8& image() { return image_; }

  template <typename T = float>
  Tensor<T> to_model() const { return image_to_model<T>(image_); }

  bool operator==(const Sprite&) const = default;

 private:
  ImageRgba8 image_;
};

// One paired example: the same character in all four poses.
struct CharacterSheet {
  std::string id;
  std::array<Sprite, kNumDomains> poses;

  const Sprite& pose(DomainId d) const { return poses[static_cast<size_t>(index_of(d))]; }
  Sprite& pose(DomainId d) { return poses[static_cast<size_t>(index_of(d))]; }

  bool operator==(const CharacterSheet&) const = default;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<CharacterSheet> sheets, std::string split_tag)
      : sheets_(std::move(sheets)), split_tag_(std::move(split_tag)) {
    std::unordered_set<std::string> seen;
    for (const auto& sheet : sheets_)
      require(seen.insert(sheet.id).second, "duplicate character id: ", sheet.id);
  }

  const std::vector<CharacterSheet>& sheets() const { return sheets_; }
  const CharacterSheet& sheet(size_t i) const { return sheets_[i]; }
  size_t size() const { return sheets_.size(); }
  bool empty() const { return sheets_.empty(); }
  const std::string& split_tag() const { return split_tag_; }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<CharacterSheet> sheets_;
  std::string split_tag_ = "train";
};

}  // namespace collasprite
