#pragma once

#include <array>
#include <charconv>
#include <string>
#include <system_error>

namespace invint {

// Shortest decimal string that parses back to exactly `value`.
inline std::string format_real(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), end);
}

}  // namespace invint
