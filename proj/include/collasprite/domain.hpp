#pragma once

#include <array>
#include <string>
#include <string_view>

#include "collasprite/common.hpp"

namespace collasprite {

// Canonical pose order. The index fixes label channels, file naming, report
// rows and every per-domain array in the system.
enum class DomainId : int { back = 0, left = 1, front = 2, right = 3 };

inline constexpr int kNumDomains = 4;

inline constexpr std::array<DomainId, kNumDomains> all_domains() {
  return {DomainId::back, DomainId::left, DomainId::front, DomainId::right};
}

inline constexpr int index_of(DomainId d) { return static_cast<int>(d); }

inline constexpr std::string_view domain_name(DomainId d) {
  constexpr std::array<std::string_view, kNumDomains> names = {"back", "left",
                                                               "front", "right"};
  return names[static_cast<size_t>(index_of(d))];
}

inline DomainId domain_from_index(int i) {
  require(i >= 0 && i < kNumDomains, "domain index out of range: ", i);
  return static_cast<DomainId>(i);
}

inline DomainId parse_domain(std::string_view name) {
  for (DomainId d : all_domains())
    if (domain_name(d) == name) return d;
  fail("unknown pose name '", std::string(name), "' (expected back|left|front|right)");
}

}  // namespace collasprite
