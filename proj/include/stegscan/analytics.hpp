#pragma once

// File-level analytics: byte entropy, printable strings, hex dump.

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "stegscan/bytes.hpp"

namespace stegscan {

// Shannon entropy in bits per byte. Empty input is defined as 0.
inline double shannon_entropy(ByteView input) {
  if (input.empty()) return 0.0;
  std::array<std::size_t, 256> counts{};
  for (auto b : input) ++counts[b];
  const double n = static_cast<double>(input.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return std::clamp(h, 0.0, 8.0);
}

struct ExtractedString {
  std::size_t offset = 0;
  std::string text;

  bool operator==(const ExtractedString&) const = default;
};

inline bool is_printable_ascii(std::uint8_t b) { return b >= 0x20 && b <= 0x7E; }

inline std::vector<ExtractedString> extract_strings(ByteView input, std::size_t min_len) {
  if (min_len == 0) min_len = 1;
  std::vector<ExtractedString> out;
  std::size_t i = 0;
  while (i < input.size()) {
    if (!is_printable_ascii(input[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < input.size() && is_printable_ascii(input[i])) ++i;
    if (i - start >= min_len) out.push_back({start, to_string(input.subspan(start, i - start))});
  }
  return out;
}

// 16 bytes per line: 8-digit hex offset, bytes with an extra gap after the
// eighth, then an ASCII gutter. Offsets are absolute positions in `input`.
inline std::string hexdump(ByteView input, std::size_t offset, std::size_t length) {
  if (offset > input.size() || length > input.size() - offset)
    throw BoundsError("hexdump range [" + std::to_string(offset) + ", +" + std::to_string(length) +
                      ") exceeds input of " + std::to_string(input.size()) + " bytes");
  std::string out;
  char buf[16];
  for (std::size_t line = 0; line < length; line += 16) {
    const std::size_t count = std::min<std::size_t>(16, length - line);
    std::snprintf(buf, sizeof buf, "%08zx  ", offset + line);
    out += buf;
    for (std::size_t i = 0; i < 16; ++i) {
      if (i < count) {
        std::snprintf(buf, sizeof buf, "%02x ", input[offset + line + i]);
        out += buf;
      } else {
        out += "   ";
      }
      if (i == 7) out += ' ';
    }
    out += " |";
    for (std::size_t i = 0; i < count; ++i) {
      const auto b = input[offset + line + i];
      out += is_printable_ascii(b) ? static_cast<char>(b) : '.';
    }
    out += "|\n";
  }
  return out;
}

}  // namespace stegscan
