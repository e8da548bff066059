#include "profilernet/format.hpp"

#include <array>
#include <charconv>

namespace profilernet {

std::string format_shortest(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_general(double x, int significant) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                           std::chars_format::general, significant);
  return std::string(buf.data(), res.ptr);
}

}  // namespace profilernet
