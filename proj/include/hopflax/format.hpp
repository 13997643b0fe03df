#ifndef HOPFLAX_FORMAT_HPP
#define HOPFLAX_FORMAT_HPP

#include <array>
#include <charconv>
#include <string>

namespace hopflax::format {

/// Shortest decimal representation that parses back to the same double, so
/// emitted reports are byte-stable across runs.
inline std::string double_repr(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace hopflax::format

#endif
