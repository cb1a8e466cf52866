#pragma once

#include <bit>
#include <sstream>
#include <stdexcept>
#include <string>

namespace collasprite {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

inline constexpr int kSpriteSize = 64;
inline constexpr int kSpriteChannels = 4;

namespace detail {
inline void concat_into(std::ostringstream&) {}
template <typename Head, typename... Tail>
void concat_into(std::ostringstream& os, const Head& head, const Tail&... tail) {
  os << head;
  concat_into(os, tail...);
}
}  // namespace detail

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  detail::concat_into(os, parts...);
  return os.str();
}

// Single exception type for contract and I/O failures; the CLI maps it to a
// nonzero exit with the message on stderr.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  throw Error(concat(parts...));
}

template <typename... Parts>
void require(bool condition, const Parts&... parts) {
  if (!condition) fail(parts...);
}

}  // namespace collasprite
